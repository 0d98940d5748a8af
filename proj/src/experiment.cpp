#include "gcs/experiment.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <utility>

#include <json.hpp>

#include "gcs/ensemble.hpp"
#include "gcs/errors.hpp"
#include "gcs/keyed_rng.hpp"
#include "gcs/metrics.hpp"
#include "gcs/stats.hpp"
#include "gcs/toy_models.hpp"

namespace gcs {
namespace {

using nlohmann::json;

// Derivation streams hanging off the master seed. Prompts and twins are
// fixed across runs; latents and sampling noise vary per run.
constexpr std::uint64_t kPromptStream = 10;
constexpr std::uint64_t kTwinStream = 20;
constexpr std::uint64_t kEnsembleSideAStream = 30;
constexpr std::uint64_t kEnsembleSideBStream = 31;
constexpr std::uint64_t kLatentStream = 40;
constexpr std::uint64_t kNoiseStream = 41;

// Keeps per-pair ensemble member seeds disjoint; ensemble_size is capped at
// this stride by config validation.
constexpr int kEnsembleStride = 8;

Token most_frequent_token(const Corpus& corpus) {
  std::vector<std::int64_t> counts(static_cast<std::size_t>(corpus.vocab.size()), 0);
  for (const auto& doc : corpus.documents) {
    for (const Token t : doc) ++counts[static_cast<std::size_t>(t)];
  }
  Token best = Vocabulary::kEos;
  std::int64_t best_count = -1;
  for (Token t = 0; t < corpus.vocab.size(); ++t) {
    if (t == Vocabulary::kEos) continue;
    if (counts[static_cast<std::size_t>(t)] > best_count) {
      best = t;
      best_count = counts[static_cast<std::size_t>(t)];
    }
  }
  return best;
}

int trait_label(const Response& response, Token trait) {
  const auto& t = response.tokens;
  return std::find(t.begin(), t.end(), trait) != t.end() ? 1 : 0;
}

std::vector<std::vector<Token>> make_prompts(const NgramModel& base,
                                             const ExperimentConfig& config) {
  std::vector<std::vector<Token>> prompts(static_cast<std::size_t>(config.pairs));
  if (config.prompt_tokens == 0) return prompts;
  const std::uint64_t ns = keyed::derive(config.seed, kPromptStream);
  SamplerConfig sampler;
  sampler.kind = SamplerKind::IS;
  sampler.temperature = 1.0;
  sampler.max_tokens = config.prompt_tokens;
  const std::vector<Token> empty;
  for (int j = 0; j < config.pairs; ++j) {
    sampler.rng_seed = keyed::derive(ns, static_cast<std::uint64_t>(j));
    Response drawn = generate(base, empty, sampler);
    if (drawn.finished) drawn.tokens.pop_back();
    prompts[static_cast<std::size_t>(j)] = std::move(drawn.tokens);
  }
  return prompts;
}

struct CellAccumulator {
  std::vector<stats::RunningMean> jaccard;
  std::vector<stats::RunningMean> match;
  std::vector<stats::RunningMean> agree;

  explicit CellAccumulator(int runs)
      : jaccard(static_cast<std::size_t>(runs)),
        match(static_cast<std::size_t>(runs)),
        agree(static_cast<std::size_t>(runs)) {}
};

// --- JSON field readers -----------------------------------------------------

[[noreturn]] void fail_field(const std::string& field, const std::string& what) {
  throw ConfigError("config field \"" + field + "\": " + what);
}

int read_int(const json& value, const std::string& field) {
  if (!value.is_number_integer()) fail_field(field, "expected an integer");
  return value.get<int>();
}

double read_number(const json& value, const std::string& field) {
  if (!value.is_number()) fail_field(field, "expected a number");
  return value.get<double>();
}

bool read_bool(const json& value, const std::string& field) {
  if (!value.is_boolean()) fail_field(field, "expected true or false");
  return value.get<bool>();
}

std::string read_string(const json& value, const std::string& field) {
  if (!value.is_string()) fail_field(field, "expected a string");
  return value.get<std::string>();
}

std::vector<double> read_number_list(const json& value, const std::string& field) {
  if (!value.is_array()) fail_field(field, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(value.size());
  for (const auto& item : value) out.push_back(read_number(item, field));
  return out;
}

}  // namespace

std::string to_string(LatentScope scope) {
  return scope == LatentScope::PerPair ? "per-pair" : "global";
}

LatentScope parse_latent_scope(const std::string& name) {
  if (name == "per-pair") return LatentScope::PerPair;
  if (name == "global") return LatentScope::Global;
  throw ConfigError("unknown latent scope \"" + name +
                    "\" (expected \"per-pair\" or \"global\")");
}

std::string to_string(ReportFormat format) {
  return format == ReportFormat::Csv ? "csv" : "jsonl";
}

ReportFormat parse_report_format(const std::string& name) {
  if (name == "csv") return ReportFormat::Csv;
  if (name == "jsonl") return ReportFormat::Jsonl;
  throw ConfigError("unknown report format \"" + name +
                    "\" (expected \"csv\" or \"jsonl\")");
}

EnsembleModel::EnsembleModel(std::vector<const SequenceModel*> members)
    : members_(std::move(members)) {
  if (members_.empty()) {
    throw std::invalid_argument("ensemble model needs at least one member");
  }
  for (const SequenceModel* m : members_) {
    if (m == nullptr) throw std::invalid_argument("ensemble member is null");
    if (m->vocab_size() != members_.front()->vocab_size() ||
        m->eos_token() != members_.front()->eos_token()) {
      throw std::invalid_argument("ensemble members disagree on vocabulary");
    }
  }
}

LogDistribution EnsembleModel::next(std::span<const Token> prompt,
                                    std::span<const Token> prefix) const {
  std::vector<LogDistribution> conditionals;
  conditionals.reserve(members_.size());
  for (const SequenceModel* m : members_) {
    conditionals.push_back(m->next(prompt, prefix));
  }
  return geometric_ensemble(conditionals);
}

int EnsembleModel::vocab_size() const { return members_.front()->vocab_size(); }

Token EnsembleModel::eos_token() const { return members_.front()->eos_token(); }

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) {
    throw ConfigError("config must be a JSON object");
  }

  ExperimentConfig config;
  for (const auto& [key, value] : doc.items()) {
    if (key == "kinds") {
      if (!value.is_array()) fail_field(key, "expected an array of kind names");
      config.kinds.clear();
      for (const auto& item : value) {
        try {
          config.kinds.push_back(parse_sampler_kind(read_string(item, key)));
        } catch (const ConfigError& e) {
          fail_field(key, e.what());
        }
      }
    } else if (key == "temperatures") {
      config.temperatures = read_number_list(value, key);
    } else if (key == "epsilons") {
      config.epsilons = read_number_list(value, key);
    } else if (key == "scope") {
      try {
        config.scope = parse_latent_scope(read_string(value, key));
      } catch (const ConfigError& e) {
        fail_field(key, e.what());
      }
    } else if (key == "pairs") {
      config.pairs = read_int(value, key);
    } else if (key == "max_tokens") {
      config.max_tokens = read_int(value, key);
    } else if (key == "ensembling") {
      config.ensembling = read_bool(value, key);
    } else if (key == "ensemble_size") {
      config.ensemble_size = read_int(value, key);
    } else if (key == "runs") {
      config.runs = read_int(value, key);
    } else if (key == "ngram_order") {
      config.ngram_order = read_int(value, key);
    } else if (key == "ngram_alpha") {
      config.ngram_alpha = read_number(value, key);
    } else if (key == "prompt_tokens") {
      config.prompt_tokens = read_int(value, key);
    } else if (key == "seed") {
      if (!value.is_number_integer() ||
          (!value.is_number_unsigned() && value.get<std::int64_t>() < 0)) {
        fail_field(key, "expected a non-negative integer");
      }
      config.seed = value.get<std::uint64_t>();
    } else if (key == "corpus_path") {
      config.corpus_path = read_string(value, key);
    } else if (key == "out") {
      config.out = read_string(value, key);
    } else if (key == "format") {
      try {
        config.format = parse_report_format(read_string(value, key));
      } catch (const ConfigError& e) {
        fail_field(key, e.what());
      }
    } else {
      throw ConfigError("unknown config field \"" + key + "\"");
    }
  }

  validate_experiment_config(config);
  return config;
}

void validate_experiment_config(const ExperimentConfig& config) {
  if (config.kinds.empty()) fail_field("kinds", "must list at least one kind");
  if (config.temperatures.empty()) {
    fail_field("temperatures", "must list at least one temperature");
  }
  for (const double t : config.temperatures) {
    if (!(std::isfinite(t) && t >= 0.0)) {
      fail_field("temperatures", "temperatures must be finite and >= 0");
    }
  }
  if (config.epsilons.empty()) {
    fail_field("epsilons", "must list at least one epsilon");
  }
  for (const double e : config.epsilons) {
    if (!(std::isfinite(e) && e >= 0.0)) {
      fail_field("epsilons", "epsilons must be finite and >= 0");
    }
  }
  if (config.pairs < 1) fail_field("pairs", "must be >= 1");
  if (config.max_tokens < 1) fail_field("max_tokens", "must be >= 1");
  if (config.ensemble_size < 2 || config.ensemble_size > kEnsembleStride) {
    fail_field("ensemble_size", "must be between 2 and 8");
  }
  if (config.runs < 2) fail_field("runs", "must be >= 2");
  if (config.ngram_order < 1) fail_field("ngram_order", "must be >= 1");
  if (!(std::isfinite(config.ngram_alpha) && config.ngram_alpha > 0.0)) {
    fail_field("ngram_alpha", "must be finite and > 0");
  }
  if (config.prompt_tokens < 0) fail_field("prompt_tokens", "must be >= 0");
  if (config.out.empty()) fail_field("out", "must not be empty");
}

std::vector<ExperimentRow> run_experiment(const ExperimentConfig& config) {
  validate_experiment_config(config);

  const Corpus corpus = [&config] {
    if (config.corpus_path.empty()) {
      return load_corpus_text(builtin_corpus_text());
    }
    try {
      return load_corpus(config.corpus_path);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("config field \"corpus_path\": ") + e.what());
    }
  }();
  const NgramModel base = train_ngram(corpus, config.ngram_order, config.ngram_alpha);
  const Token trait = most_frequent_token(corpus);
  const auto prompts = make_prompts(base, config);

  const int kind_count = static_cast<int>(config.kinds.size());
  const int temp_count = static_cast<int>(config.temperatures.size());
  const int eps_count = static_cast<int>(config.epsilons.size());
  const int variants = config.ensembling ? 2 : 1;
  const int cell_count = kind_count * temp_count * eps_count * variants;
  const auto cell_index = [&](int k, int t, int e, int v) {
    return ((k * temp_count + t) * eps_count + e) * variants + v;
  };

  std::vector<CellAccumulator> cells(static_cast<std::size_t>(cell_count),
                                     CellAccumulator(config.runs));

  const std::uint64_t twin_ns = keyed::derive(config.seed, kTwinStream);
  const std::uint64_t side_a_ns = keyed::derive(config.seed, kEnsembleSideAStream);
  const std::uint64_t side_b_ns = keyed::derive(config.seed, kEnsembleSideBStream);
  const std::uint64_t latent_ns = keyed::derive(config.seed, kLatentStream);
  const std::uint64_t noise_ns = keyed::derive(config.seed, kNoiseStream);

  for (int e = 0; e < eps_count; ++e) {
    const double epsilon = config.epsilons[static_cast<std::size_t>(e)];
    for (int j = 0; j < config.pairs; ++j) {
      const auto pair_id = static_cast<std::uint64_t>(j);
      const NgramModel twin =
          perturb_twin(base, {epsilon, keyed::derive(twin_ns, pair_id)});

      // Ensembled variant: each side pools its own model with fresh twins of
      // the base, shrinking the pair's effective distribution gap.
      std::vector<NgramModel> extras_a;
      std::vector<NgramModel> extras_b;
      std::optional<EnsembleModel> ensemble_a;
      std::optional<EnsembleModel> ensemble_b;
      if (config.ensembling) {
        std::vector<const SequenceModel*> members_a = {&base};
        std::vector<const SequenceModel*> members_b = {&twin};
        extras_a.reserve(static_cast<std::size_t>(config.ensemble_size - 1));
        extras_b.reserve(static_cast<std::size_t>(config.ensemble_size - 1));
        for (int i = 0; i + 1 < config.ensemble_size; ++i) {
          const auto member_id =
              static_cast<std::uint64_t>(j * kEnsembleStride + i);
          extras_a.push_back(
              perturb_twin(base, {epsilon, keyed::derive(side_a_ns, member_id)}));
          extras_b.push_back(
              perturb_twin(base, {epsilon, keyed::derive(side_b_ns, member_id)}));
        }
        for (const auto& m : extras_a) members_a.push_back(&m);
        for (const auto& m : extras_b) members_b.push_back(&m);
        ensemble_a.emplace(std::move(members_a));
        ensemble_b.emplace(std::move(members_b));
      }

      const auto& prompt = prompts[static_cast<std::size_t>(j)];
      for (int run = 0; run < config.runs; ++run) {
        const auto run_id = static_cast<std::uint64_t>(run);
        const std::uint64_t run_latent_ns = keyed::derive(latent_ns, run_id);
        const std::uint64_t run_noise_ns = keyed::derive(noise_ns, run_id);
        const std::uint64_t latent = config.scope == LatentScope::PerPair
                                         ? keyed::derive(run_latent_ns, pair_id)
                                         : run_latent_ns;

        for (int k = 0; k < kind_count; ++k) {
          for (int t = 0; t < temp_count; ++t) {
            for (int v = 0; v < variants; ++v) {
              SamplerConfig side_a;
              side_a.kind = config.kinds[static_cast<std::size_t>(k)];
              side_a.temperature =
                  config.temperatures[static_cast<std::size_t>(t)];
              side_a.max_tokens = config.max_tokens;
              side_a.latent_seed = latent;
              side_a.rng_seed = keyed::derive(run_noise_ns, 2 * pair_id);
              SamplerConfig side_b = side_a;
              side_b.rng_seed = keyed::derive(run_noise_ns, 2 * pair_id + 1);

              const SequenceModel& model_a =
                  v == 1 ? static_cast<const SequenceModel&>(*ensemble_a) : base;
              const SequenceModel& model_b =
                  v == 1 ? static_cast<const SequenceModel&>(*ensemble_b) : twin;
              const Response response_a = generate(model_a, prompt, side_a);
              const Response response_b = generate(model_b, prompt, side_b);

              auto& cell = cells[static_cast<std::size_t>(cell_index(k, t, e, v))];
              const auto run_slot = static_cast<std::size_t>(run);
              cell.jaccard[run_slot].add(
                  metrics::jaccard(response_a, response_b, base.eos_token()));
              cell.match[run_slot].add(
                  metrics::position_match_rate(response_a, response_b));
              const std::array<int, 2> labels = {trait_label(response_a, trait),
                                                 trait_label(response_b, trait)};
              cell.agree[run_slot].add(metrics::p_repeat_unbiased(labels));
            }
          }
        }
      }
    }
  }

  std::vector<ExperimentRow> rows;
  rows.reserve(static_cast<std::size_t>(cell_count));
  for (int k = 0; k < kind_count; ++k) {
    for (int t = 0; t < temp_count; ++t) {
      for (int e = 0; e < eps_count; ++e) {
        for (int v = 0; v < variants; ++v) {
          const auto& cell = cells[static_cast<std::size_t>(cell_index(k, t, e, v))];
          std::vector<double> run_jaccards;
          stats::RunningMean match_over_runs;
          stats::RunningMean agree_over_runs;
          run_jaccards.reserve(static_cast<std::size_t>(config.runs));
          for (int run = 0; run < config.runs; ++run) {
            const auto run_slot = static_cast<std::size_t>(run);
            run_jaccards.push_back(cell.jaccard[run_slot].mean());
            match_over_runs.add(cell.match[run_slot].mean());
            agree_over_runs.add(cell.agree[run_slot].mean());
          }
          const auto jaccard_summary = stats::mean_stderr(run_jaccards);

          ExperimentRow row;
          row.kind = to_string(config.kinds[static_cast<std::size_t>(k)]);
          row.temperature = config.temperatures[static_cast<std::size_t>(t)];
          row.epsilon = config.epsilons[static_cast<std::size_t>(e)];
          row.ensembled = v == 1;
          row.n = v == 1 ? config.ensemble_size : 1;
          row.pairs = config.pairs;
          row.jaccard_mean = jaccard_summary.mean;
          row.jaccard_stderr = jaccard_summary.std_error;
          row.match_rate = match_over_runs.mean();
          row.p_repeat = agree_over_runs.mean();
          row.seed = config.seed;
          row.scope = to_string(config.scope);
          rows.push_back(std::move(row));
        }
      }
    }
  }
  return rows;
}

namespace {

std::string format_double(double x) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.9g", x);
  return buffer;
}

}  // namespace

void write_rows(std::span<const ExperimentRow> rows, ReportFormat format,
                std::ostream& out) {
  if (format == ReportFormat::Csv) {
    out << "kind,temperature,epsilon,ensembled,n,pairs,jaccard_mean,"
           "jaccard_stderr,match_rate,p_repeat,seed,scope\n";
    for (const auto& row : rows) {
      out << row.kind << ',' << format_double(row.temperature) << ','
          << format_double(row.epsilon) << ','
          << (row.ensembled ? "true" : "false") << ',' << row.n << ','
          << row.pairs << ',' << format_double(row.jaccard_mean) << ','
          << format_double(row.jaccard_stderr) << ','
          << format_double(row.match_rate) << ','
          << format_double(row.p_repeat) << ',' << row.seed << ','
          << row.scope << '\n';
    }
    return;
  }
  for (const auto& row : rows) {
    nlohmann::ordered_json line;
    line["kind"] = row.kind;
    line["temperature"] = row.temperature;
    line["epsilon"] = row.epsilon;
    line["ensembled"] = row.ensembled;
    line["n"] = row.n;
    line["pairs"] = row.pairs;
    line["jaccard_mean"] = row.jaccard_mean;
    line["jaccard_stderr"] = row.jaccard_stderr;
    line["match_rate"] = row.match_rate;
    line["p_repeat"] = row.p_repeat;
    line["seed"] = row.seed;
    line["scope"] = row.scope;
    out << line.dump() << '\n';
  }
}

}  // namespace gcs
