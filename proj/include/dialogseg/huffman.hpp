#pragma once

#include <cstdint>
#include <vector>

#include "dialogseg/corpus.hpp"

namespace dialogseg {

/// Binary prefix code over word frequencies for the hierarchical softmax.
/// paths[w] lists inner-node ids (0..V-2) from the root down to the leaf's
/// parent; codes[w] holds the branch taken at each of those nodes.
struct HuffmanTree {
    std::vector<std::vector<std::uint32_t>> paths;
    std::vector<std::vector<std::uint8_t>> codes;
    std::size_t inner_count = 0;

    std::size_t code_length(std::size_t word_id) const { return codes[word_id].size(); }
};

/// Deterministic Huffman construction: repeatedly merge the two lowest-weight
/// nodes, ties broken toward the lower node id; merged nodes get ids V, V+1,
/// ... in creation order. Throws EmptyVocabulary when the vocabulary has
/// fewer than two words.
HuffmanTree build_huffman(const Vocabulary& vocab);

}  // namespace dialogseg
