#pragma once

// Optional per-token inputs: pretrained word vectors (word2vec text format)
// and external feature vectors (JSONL aligned with a corpus).

#include <string>
#include <vector>

#include "ucca/nn/layers.hpp"
#include "ucca/vocab.hpp"

namespace ucca {

struct PretrainedTable {
  int dim = 0;
  StringVocab words;
  std::vector<nn::Vec> vectors;  // parallel to words; row 0 (unknown) is zero
};

// "word v1 ... vk" per line. A leading "count dim" header line is skipped.
// Throws FormatError on ragged rows or non-numeric values.
PretrainedTable load_pretrained(const std::string& path);

// Per sentence, one vector per token: {"vectors": [[...], ...]} per line.
// All vectors must share one width, returned through dim (0 if no tokens).
std::vector<std::vector<nn::Vec>> read_external_features(const std::string& path, int* dim = nullptr);

}  // namespace ucca
