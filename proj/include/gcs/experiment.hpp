#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "gcs/samplers.hpp"
#include "gcs/types.hpp"

namespace gcs {

// Whether the consistency latent is resampled for every prompt pair or one
// latent is shared by all pairs of a run.
enum class LatentScope { PerPair, Global };

std::string to_string(LatentScope scope);
LatentScope parse_latent_scope(const std::string& name);

enum class ReportFormat { Csv, Jsonl };

std::string to_string(ReportFormat format);
ReportFormat parse_report_format(const std::string& name);

// Sequence model whose conditionals are the geometric ensemble of the
// members' conditionals. Members are borrowed and must outlive the wrapper;
// they must agree on vocab size and eos token.
class EnsembleModel final : public SequenceModel {
 public:
  explicit EnsembleModel(std::vector<const SequenceModel*> members);

  LogDistribution next(std::span<const Token> prompt,
                       std::span<const Token> prefix) const override;
  int vocab_size() const override;
  Token eos_token() const override;

 private:
  std::vector<const SequenceModel*> members_;
};

struct ExperimentConfig {
  std::vector<SamplerKind> kinds = {SamplerKind::IS, SamplerKind::GCS,
                                    SamplerKind::GCSwR};
  std::vector<double> temperatures = {1.0};
  std::vector<double> epsilons = {0.5};
  LatentScope scope = LatentScope::PerPair;
  int pairs = 300;
  int max_tokens = 32;
  // When true, every (kind, temperature, epsilon) cell is reported twice:
  // once plain and once with each side replaced by a geometric ensemble of
  // ensemble_size distributions.
  bool ensembling = false;
  int ensemble_size = 3;
  int runs = 3;
  int ngram_order = 3;
  double ngram_alpha = 0.1;
  int prompt_tokens = 2;
  std::uint64_t seed = 2026;
  std::string corpus_path;  // empty selects the bundled corpus
  std::string out = "-";
  ReportFormat format = ReportFormat::Csv;
};

// Parses and validates a JSON config document. Unknown fields, wrong types,
// and out-of-domain values raise ConfigError naming the offending field.
ExperimentConfig parse_experiment_config(const std::string& json_text);

// Domain checks shared by the JSON path and directly constructed configs.
void validate_experiment_config(const ExperimentConfig& config);

// One report row: a (kind, temperature, epsilon, ensembled) cell aggregated
// over all prompt pairs, with mean and standard error taken across runs.
struct ExperimentRow {
  std::string kind;
  double temperature = 1.0;
  double epsilon = 0.0;
  bool ensembled = false;
  int n = 1;  // number of distributions behind each side of a pair
  int pairs = 0;
  double jaccard_mean = 0.0;
  double jaccard_stderr = 0.0;
  double match_rate = 0.0;
  double p_repeat = 0.0;
  std::uint64_t seed = 0;
  std::string scope;
};

// Runs the full grid in config order and returns one row per cell.
std::vector<ExperimentRow> run_experiment(const ExperimentConfig& config);

void write_rows(std::span<const ExperimentRow> rows, ReportFormat format,
                std::ostream& out);

}  // namespace gcs
