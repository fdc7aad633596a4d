#include "dialogseg/huffman.hpp"

#include <algorithm>
#include <queue>
#include <utility>

namespace dialogseg {

HuffmanTree build_huffman(const Vocabulary& vocab) {
    const std::size_t v = vocab.size();
    if (v < 2) throw EmptyVocabulary("hierarchical softmax needs at least 2 words");

    using Item = std::pair<std::uint64_t, std::uint32_t>;  // (weight, node id)
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
    for (std::size_t id = 0; id < v; ++id)
        heap.emplace(vocab.count(id), static_cast<std::uint32_t>(id));

    // parent[] and branch[] cover leaves 0..V-1 then inner nodes V..2V-2.
    std::vector<std::uint32_t> parent(2 * v - 1, 0);
    std::vector<std::uint8_t> branch(2 * v - 1, 0);
    std::uint32_t next_id = static_cast<std::uint32_t>(v);
    while (heap.size() > 1) {
        Item lo = heap.top();
        heap.pop();
        Item hi = heap.top();
        heap.pop();
        parent[lo.second] = next_id;
        branch[lo.second] = 0;
        parent[hi.second] = next_id;
        branch[hi.second] = 1;
        heap.emplace(lo.first + hi.first, next_id);
        ++next_id;
    }
    const std::uint32_t root = next_id - 1;

    HuffmanTree tree;
    tree.inner_count = v - 1;
    tree.paths.resize(v);
    tree.codes.resize(v);
    for (std::size_t w = 0; w < v; ++w) {
        std::uint32_t node = static_cast<std::uint32_t>(w);
        while (node != root) {
            tree.codes[w].push_back(branch[node]);
            node = parent[node];
            tree.paths[w].push_back(node - static_cast<std::uint32_t>(v));
        }
        std::reverse(tree.codes[w].begin(), tree.codes[w].end());
        std::reverse(tree.paths[w].begin(), tree.paths[w].end());
    }
    return tree;
}

}  // namespace dialogseg
