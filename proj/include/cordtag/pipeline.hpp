#ifndef CORDTAG_PIPELINE_HPP
#define CORDTAG_PIPELINE_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "cordtag/backend.hpp"
#include "cordtag/document.hpp"
#include "cordtag/store.hpp"

namespace cordtag {

struct PipelineConfig {
  int workers = 1;
  int batch_size = 10;  // documents per batch (backends may override)
  Scope scope = Scope::Fulltext;
  int retry_limit = 1;  // additional attempts after a batch failure
  std::vector<TaggerBackendConfig> backends;
};

class PipelineError : public std::runtime_error {
 public:
  explicit PipelineError(const std::string& msg) : std::runtime_error(msg) {}
};

// Parses the key-value pipeline config format:
//
//   scope = abstracts | fulltext
//   workers = 4
//   batch_size = 10
//   retry_limit = 1
//
//   [backend chemicals]
//   kind = builtin-lexicon
//   types = Chemical, Disease
//   vocabulary = vocab.tsv
//
//   [backend genes]
//   kind = external-process
//   types = Gene, Species
//   command = run_tagger.sh {input} {output}
//   timeout = 300
//   batch_docs = 50
//   scratch = /tmp/scratch
//
// Relative paths resolve against the config file's directory. '#' starts a
// comment. The CORDTAG_WORKERS and CORDTAG_SCRATCH environment variables
// override the worker count and the external backends' scratch directory.
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

// Worker count / scratch overrides from the environment.
void apply_env_overrides(PipelineConfig& config);

// Checks structural invariants: at least one backend, unique backend names,
// each entity type handled by at most one backend, positive sizes.
void validate_pipeline_config(const PipelineConfig& config);

// Partitions items in order; every batch except possibly the last has
// exactly batch_size elements.
template <typename T>
std::vector<std::vector<T>> plan_batches(const std::vector<T>& items,
                                         std::size_t batch_size) {
  if (batch_size == 0) {
    throw PipelineError("batch size must be >= 1");
  }
  std::vector<std::vector<T>> batches;
  for (std::size_t pos = 0; pos < items.size(); pos += batch_size) {
    std::size_t end = std::min(items.size(), pos + batch_size);
    batches.emplace_back(items.begin() + pos, items.begin() + end);
  }
  return batches;
}

struct BatchFailure {
  std::size_t batch_index = 0;
  std::string backend;
  std::size_t documents = 0;
  std::string error;
};

// Tally of one pipeline run. Counts are (document, backend) work units:
// processed + failed equals the units scheduled this run, skipped counts
// units already complete from earlier runs with the same fingerprint.
struct RunReport {
  std::int64_t run_id = -1;
  std::size_t documents_processed = 0;
  std::size_t documents_failed = 0;
  std::size_t documents_skipped = 0;
  std::array<std::uint64_t, 4> mentions_per_type{};  // kAllEntityTypes order
  double wall_seconds = 0.0;
  std::vector<BatchFailure> failures;
};

// Splits the stored corpus into batches and drives the backends over them
// with `workers` threads pulling from a shared queue. Results are committed
// transactionally per document in a deterministic order, so the final store
// state is independent of worker count and batch interleaving. Documents
// already tagged by a backend with an identical fingerprint are skipped,
// which makes reruns idempotent and interrupted runs resumable. Failed
// batches are retried up to retry_limit, then reported; the call throws only
// if every scheduled batch failed.
RunReport run_pipeline(const PipelineConfig& config, Store& store);

// Same, with caller-supplied backend instances (config.backends is ignored
// except for validation-irrelevant fields). Used by tests to inject stubs.
RunReport run_pipeline_with_backends(
    const PipelineConfig& config, Store& store,
    const std::vector<std::shared_ptr<TaggerBackend>>& backends);

}  // namespace cordtag

#endif  // CORDTAG_PIPELINE_HPP
