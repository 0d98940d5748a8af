#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "gcs/log_distribution.hpp"
#include "gcs/samplers.hpp"
#include "gcs/types.hpp"

namespace gcs {

// Word table for whitespace-tokenized text. Id 0 is reserved for the
// end-of-document marker.
class Vocabulary {
 public:
  static constexpr Token kEos = 0;
  static constexpr const char* kEosWord = "</s>";

  explicit Vocabulary(const std::vector<std::string>& words);

  Token id(const std::string& word) const;
  const std::string& word(Token token) const;
  bool contains(const std::string& word) const;
  int size() const { return static_cast<int>(words_.size()); }

 private:
  std::vector<std::string> words_;
  std::map<std::string, Token> ids_;
};

struct Corpus {
  Vocabulary vocab;
  std::vector<std::vector<Token>> documents;  // eos marker not stored
};

// Parses one document per line, whitespace-tokenized; blank lines skipped.
Corpus load_corpus_text(const std::string& text);
Corpus load_corpus(const std::string& path);

// Small corpus compiled into the library so experiments are hermetic.
const char* builtin_corpus_text();

struct TwinSpec {
  double epsilon = 0.0;  // perturbation strength; 0 reproduces the model
  std::uint64_t seed = 0;
};

// Add-alpha smoothed n-gram model over a Corpus vocabulary. Contexts are the
// (n-1)-token windows seen in training; anything shorter or unseen backs off
// to the smoothed unigram distribution.
class NgramModel final : public SequenceModel {
 public:
  using ContextTable = std::map<std::vector<Token>, LogDistribution>;

  NgramModel(int order, double alpha, LogDistribution unigram, ContextTable table);

  LogDistribution next(std::span<const Token> prompt,
                       std::span<const Token> prefix) const override;
  int vocab_size() const override { return unigram_.size(); }
  Token eos_token() const override { return Vocabulary::kEos; }

  int order() const { return order_; }
  double alpha() const { return alpha_; }
  const LogDistribution& fallback() const { return unigram_; }
  const ContextTable& contexts() const { return table_; }

 private:
  int order_;
  double alpha_;
  LogDistribution unigram_;
  ContextTable table_;
};

NgramModel train_ngram(const Corpus& corpus, int n, double alpha);

// Replaces every conditional with a draw from a Dirichlet centered on it
// (concentration d/epsilon, so the mean is preserved), deterministically per
// seed. epsilon 0 returns an identical model.
NgramModel perturb_twin(const NgramModel& model, const TwinSpec& spec);

// First-order tabular chain: an explicit start distribution plus one
// successor row per token, with token 0 as eos. The prompt is ignored, so
// conditionals depend only on the last generated token. Small enough to
// enumerate exactly, which makes it the workhorse of marginal checks.
class ChainModel final : public SequenceModel {
 public:
  ChainModel(LogDistribution initial, std::vector<LogDistribution> rows);

  LogDistribution next(std::span<const Token> prompt,
                       std::span<const Token> prefix) const override;
  int vocab_size() const override { return initial_.size(); }
  Token eos_token() const override { return 0; }

 private:
  LogDistribution initial_;
  std::vector<LogDistribution> rows_;
};

}  // namespace gcs
