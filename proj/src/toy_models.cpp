#include "gcs/toy_models.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "gcs/keyed_rng.hpp"

namespace gcs {

Vocabulary::Vocabulary(const std::vector<std::string>& words) {
  words_.reserve(words.size() + 1);
  words_.push_back(kEosWord);
  ids_.emplace(kEosWord, kEos);
  for (const auto& word : words) {
    if (word.empty()) throw std::invalid_argument("Vocabulary: empty word");
    const Token id = static_cast<Token>(words_.size());
    if (!ids_.emplace(word, id).second) {
      throw std::invalid_argument("Vocabulary: duplicate word: " + word);
    }
    words_.push_back(word);
  }
}

Token Vocabulary::id(const std::string& word) const {
  const auto it = ids_.find(word);
  if (it == ids_.end()) {
    throw std::out_of_range("Vocabulary: unknown word: " + word);
  }
  return it->second;
}

const std::string& Vocabulary::word(Token token) const {
  if (token < 0 || token >= size()) {
    throw std::out_of_range("Vocabulary: token id out of range");
  }
  return words_[static_cast<std::size_t>(token)];
}

bool Vocabulary::contains(const std::string& word) const {
  return ids_.count(word) != 0;
}

Corpus load_corpus_text(const std::string& text) {
  std::vector<std::string> words;
  std::vector<std::vector<std::string>> lines;
  std::map<std::string, bool> seen;
  std::istringstream stream(text);
  std::string line;
  while (std::getline(stream, line)) {
    std::istringstream tokens(line);
    std::vector<std::string> doc;
    std::string word;
    while (tokens >> word) {
      if (word == Vocabulary::kEosWord) {
        throw std::invalid_argument("load_corpus_text: reserved token in corpus");
      }
      if (!seen[word]) {
        seen[word] = true;
        words.push_back(word);
      }
      doc.push_back(std::move(word));
    }
    if (!doc.empty()) lines.push_back(std::move(doc));
  }

  Corpus corpus{Vocabulary(words), {}};
  corpus.documents.reserve(lines.size());
  for (const auto& doc : lines) {
    std::vector<Token> ids;
    ids.reserve(doc.size());
    for (const auto& w : doc) ids.push_back(corpus.vocab.id(w));
    corpus.documents.push_back(std::move(ids));
  }
  return corpus;
}

Corpus load_corpus(const std::string& path) {
  std::ifstream file(path);
  if (!file) {
    throw std::runtime_error("load_corpus: cannot open " + path);
  }
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return load_corpus_text(buffer.str());
}

NgramModel::NgramModel(int order, double alpha, LogDistribution unigram,
                       ContextTable table)
    : order_(order),
      alpha_(alpha),
      unigram_(std::move(unigram)),
      table_(std::move(table)) {}

LogDistribution NgramModel::next(std::span<const Token> prompt,
                                 std::span<const Token> prefix) const {
  const int context_len = order_ - 1;
  const std::size_t have = prompt.size() + prefix.size();
  if (context_len == 0 || have < static_cast<std::size_t>(context_len)) {
    return unigram_;
  }
  std::vector<Token> context;
  context.reserve(static_cast<std::size_t>(context_len));
  for (std::size_t pos = have - static_cast<std::size_t>(context_len); pos < have;
       ++pos) {
    context.push_back(pos < prompt.size() ? prompt[pos]
                                          : prefix[pos - prompt.size()]);
  }
  const auto it = table_.find(context);
  return it == table_.end() ? unigram_ : it->second;
}

namespace {

LogDistribution smoothed(const std::vector<double>& counts, double total,
                         double alpha) {
  const double denom = total + alpha * static_cast<double>(counts.size());
  std::vector<double> probs(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    probs[i] = (counts[i] + alpha) / denom;
  }
  return LogDistribution::from_probs(probs);
}

}  // namespace

NgramModel train_ngram(const Corpus& corpus, int n, double alpha) {
  if (n < 1) throw std::domain_error("train_ngram: order must be >= 1");
  if (!(alpha > 0.0)) throw std::domain_error("train_ngram: alpha must be > 0");
  if (corpus.documents.empty()) {
    throw std::domain_error("train_ngram: empty corpus");
  }

  const std::size_t vocab = static_cast<std::size_t>(corpus.vocab.size());
  const int context_len = n - 1;
  std::vector<double> unigram_counts(vocab, 0.0);
  double unigram_total = 0.0;
  std::map<std::vector<Token>, std::vector<double>> context_counts;
  std::map<std::vector<Token>, double> context_totals;

  for (const auto& doc : corpus.documents) {
    std::vector<Token> extended = doc;
    extended.push_back(Vocabulary::kEos);
    for (std::size_t j = 0; j < extended.size(); ++j) {
      const Token target = extended[j];
      unigram_counts[static_cast<std::size_t>(target)] += 1.0;
      unigram_total += 1.0;
      if (context_len > 0 && j >= static_cast<std::size_t>(context_len)) {
        const std::vector<Token> context(
            extended.begin() + static_cast<std::ptrdiff_t>(j) - context_len,
            extended.begin() + static_cast<std::ptrdiff_t>(j));
        const auto it =
            context_counts.try_emplace(context, std::vector<double>(vocab, 0.0))
                .first;
        it->second[static_cast<std::size_t>(target)] += 1.0;
        context_totals[context] += 1.0;
      }
    }
  }

  NgramModel::ContextTable table;
  for (const auto& [context, counts] : context_counts) {
    table.emplace(context, smoothed(counts, context_totals.at(context), alpha));
  }
  return NgramModel(n, alpha, smoothed(unigram_counts, unigram_total, alpha),
                    std::move(table));
}

namespace {

LogDistribution dirichlet_centered(const LogDistribution& center, double epsilon,
                                   std::uint64_t seed, std::uint64_t stream_id) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  keyed::Stream rng(seed, stream_id);
  std::vector<double> log_draw(static_cast<std::size_t>(center.size()), kNegInf);
  for (Token j = 0; j < center.size(); ++j) {
    if (center[j] == kNegInf) continue;  // zeros stay zero
    log_draw[static_cast<std::size_t>(j)] =
        rng.log_gamma(center.prob(j) / epsilon);
  }
  return normalized_from_logits(std::move(log_draw));
}

}  // namespace

NgramModel perturb_twin(const NgramModel& model, const TwinSpec& spec) {
  if (!(spec.epsilon >= 0.0)) {
    throw std::domain_error("perturb_twin: epsilon must be >= 0");
  }
  if (spec.epsilon == 0.0) {
    return NgramModel(model.order(), model.alpha(), model.fallback(),
                      model.contexts());
  }
  LogDistribution fallback =
      dirichlet_centered(model.fallback(), spec.epsilon, spec.seed, 0);
  NgramModel::ContextTable table;
  std::uint64_t stream_id = 1;
  for (const auto& [context, dist] : model.contexts()) {
    table.emplace(context,
                  dirichlet_centered(dist, spec.epsilon, spec.seed, stream_id));
    ++stream_id;
  }
  return NgramModel(model.order(), model.alpha(), std::move(fallback),
                    std::move(table));
}

ChainModel::ChainModel(LogDistribution initial, std::vector<LogDistribution> rows)
    : initial_(std::move(initial)), rows_(std::move(rows)) {
  if (static_cast<int>(rows_.size()) != initial_.size()) {
    throw std::invalid_argument("chain model needs one successor row per token");
  }
  for (const auto& row : rows_) {
    if (row.size() != initial_.size()) {
      throw std::invalid_argument("chain model rows must match the vocabulary");
    }
  }
}

LogDistribution ChainModel::next(std::span<const Token> /*prompt*/,
                                 std::span<const Token> prefix) const {
  if (prefix.empty()) return initial_;
  return rows_.at(static_cast<std::size_t>(prefix.back()));
}

}  // namespace gcs
