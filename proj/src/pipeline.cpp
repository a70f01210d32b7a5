#include "cordtag/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <thread>

#include "cordtag/hash.hpp"

namespace cordtag {

namespace {

std::string trim(std::string_view s) {
  std::size_t begin = s.find_first_not_of(" \t\r");
  if (begin == std::string_view::npos) return {};
  std::size_t end = s.find_last_not_of(" \t\r");
  return std::string(s.substr(begin, end - begin + 1));
}

int parse_int(const std::string& value, const std::string& key) {
  int out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(),
                                   out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw PipelineError("config key \"" + key + "\": not an integer: \"" +
                        value + "\"");
  }
  return out;
}

double parse_double(const std::string& value, const std::string& key) {
  try {
    std::size_t consumed = 0;
    double out = std::stod(value, &consumed);
    if (consumed != value.size()) throw std::invalid_argument(value);
    return out;
  } catch (const std::exception&) {
    throw PipelineError("config key \"" + key + "\": not a number: \"" +
                        value + "\"");
  }
}

std::vector<EntityType> parse_types(const std::string& value) {
  std::vector<EntityType> types;
  std::size_t pos = 0;
  while (pos <= value.size()) {
    std::size_t comma = value.find(',', pos);
    std::string item = trim(comma == std::string::npos
                                ? value.substr(pos)
                                : value.substr(pos, comma - pos));
    if (!item.empty()) {
      auto type = entity_type_from_string(item);
      if (!type) {
        throw PipelineError("unknown entity type in config: \"" + item + "\"");
      }
      types.push_back(*type);
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return types;
}

std::string resolve_path(const std::string& value,
                         const std::filesystem::path& base) {
  std::filesystem::path p(value);
  if (p.is_absolute()) return p.string();
  return (base / p).lexically_normal().string();
}

// Per-backend resume identity: scope plus the backend's own fingerprint.
std::string backend_scope_fingerprint(Scope scope,
                                      const TaggerBackend& backend) {
  return fnv1a_hex(std::string(to_string(scope)) + "\n" +
                   backend.fingerprint());
}

struct WorkItem {
  std::size_t index = 0;          // commit order
  std::size_t backend_index = 0;  // into the backends vector
  std::vector<std::string> paper_ids;
};

struct BatchResult {
  bool failed = false;
  std::string error;
  // mentions grouped per paper, canonical order
  std::map<std::string, std::vector<EntityMention>> per_paper;
};

}  // namespace

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw PipelineError("cannot open config file: " + path.string());
  }
  std::filesystem::path base = path.has_parent_path()
                                   ? path.parent_path()
                                   : std::filesystem::path(".");
  PipelineConfig config;
  TaggerBackendConfig* backend = nullptr;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string text = trim(line);
    if (text.empty() || text[0] == '#') continue;
    if (text.front() == '[') {
      if (text.back() != ']') {
        throw PipelineError("config line " + std::to_string(line_no) +
                            ": unterminated section header");
      }
      std::string section = trim(text.substr(1, text.size() - 2));
      if (section.rfind("backend", 0) != 0) {
        throw PipelineError("config line " + std::to_string(line_no) +
                            ": unknown section \"" + section + "\"");
      }
      std::string name = trim(section.substr(7));
      if (name.empty()) {
        throw PipelineError("config line " + std::to_string(line_no) +
                            ": backend section needs a name");
      }
      config.backends.emplace_back();
      backend = &config.backends.back();
      backend->name = name;
      continue;
    }
    std::size_t eq = text.find('=');
    if (eq == std::string::npos) {
      throw PipelineError("config line " + std::to_string(line_no) +
                          ": expected key = value");
    }
    std::string key = trim(text.substr(0, eq));
    std::string value = trim(text.substr(eq + 1));
    if (!backend) {
      if (key == "scope") {
        auto scope = scope_from_string(value);
        if (!scope) {
          throw PipelineError("config: unknown scope \"" + value + "\"");
        }
        config.scope = *scope;
      } else if (key == "workers") {
        config.workers = parse_int(value, key);
      } else if (key == "batch_size") {
        config.batch_size = parse_int(value, key);
      } else if (key == "retry_limit") {
        config.retry_limit = parse_int(value, key);
      } else {
        throw PipelineError("config line " + std::to_string(line_no) +
                            ": unknown key \"" + key + "\"");
      }
      continue;
    }
    if (key == "kind") {
      if (value == "builtin-lexicon") {
        backend->kind = BackendKind::BuiltinLexicon;
      } else if (value == "external-process") {
        backend->kind = BackendKind::ExternalProcess;
      } else {
        throw PipelineError("config: unknown backend kind \"" + value + "\"");
      }
    } else if (key == "types") {
      backend->entity_types = parse_types(value);
    } else if (key == "vocabulary") {
      backend->vocabulary_path = resolve_path(value, base);
    } else if (key == "command") {
      backend->command_template = value;
    } else if (key == "scratch") {
      backend->scratch_root = resolve_path(value, base);
    } else if (key == "timeout") {
      backend->timeout_seconds = parse_double(value, key);
    } else if (key == "batch_docs") {
      backend->batch_size = parse_int(value, key);
    } else {
      throw PipelineError("config line " + std::to_string(line_no) +
                          ": unknown key \"" + key + "\"");
    }
  }
  apply_env_overrides(config);
  return config;
}

void apply_env_overrides(PipelineConfig& config) {
  if (const char* workers = std::getenv("CORDTAG_WORKERS")) {
    config.workers = parse_int(workers, "CORDTAG_WORKERS");
  }
  if (const char* scratch = std::getenv("CORDTAG_SCRATCH")) {
    for (TaggerBackendConfig& backend : config.backends) {
      backend.scratch_root = scratch;
    }
  }
}

void validate_pipeline_config(const PipelineConfig& config) {
  if (config.workers < 1) throw PipelineError("workers must be >= 1");
  if (config.batch_size < 1) throw PipelineError("batch_size must be >= 1");
  if (config.retry_limit < 0) throw PipelineError("retry_limit must be >= 0");
  if (config.backends.empty()) {
    throw PipelineError("at least one backend is required");
  }
  std::set<std::string> names;
  std::set<EntityType> claimed;
  for (const TaggerBackendConfig& backend : config.backends) {
    validate_backend_config(backend);
    if (!names.insert(backend.name).second) {
      throw PipelineError("duplicate backend name \"" + backend.name + "\"");
    }
    for (EntityType type : backend.entity_types) {
      if (!claimed.insert(type).second) {
        throw PipelineError("entity type " + std::string(to_string(type)) +
                            " is handled by more than one backend");
      }
    }
  }
}

RunReport run_pipeline(const PipelineConfig& config, Store& store) {
  validate_pipeline_config(config);
  std::vector<std::shared_ptr<TaggerBackend>> backends;
  backends.reserve(config.backends.size());
  for (const TaggerBackendConfig& bc : config.backends) {
    backends.push_back(make_backend(bc));
  }
  return run_pipeline_with_backends(config, store, backends);
}

RunReport run_pipeline_with_backends(
    const PipelineConfig& config, Store& store,
    const std::vector<std::shared_ptr<TaggerBackend>>& backends) {
  if (config.workers < 1) throw PipelineError("workers must be >= 1");
  if (config.batch_size < 1) throw PipelineError("batch_size must be >= 1");
  if (backends.empty()) throw PipelineError("at least one backend is required");

  const auto start_time = std::chrono::steady_clock::now();
  RunReport report;

  // Combined fingerprint identifies the run configuration in the runs table.
  std::string combined;
  std::vector<std::string> fingerprints;
  for (const auto& backend : backends) {
    fingerprints.push_back(backend_scope_fingerprint(config.scope, *backend));
    combined += backend->name() + "=" + fingerprints.back() + "\n";
  }
  report.run_id = store.begin_run(fnv1a_hex(combined));

  const std::vector<std::string> all_ids = store.paper_ids();

  // Scheduled work: per backend, the documents not yet marked complete.
  std::vector<WorkItem> items;
  for (std::size_t b = 0; b < backends.size(); ++b) {
    std::vector<std::string> completed =
        store.completed_papers(backends[b]->name(), fingerprints[b]);
    std::set<std::string> done(completed.begin(), completed.end());
    std::vector<std::string> pending;
    for (const std::string& id : all_ids) {
      if (done.count(id)) {
        ++report.documents_skipped;
      } else {
        pending.push_back(id);
      }
    }
    std::size_t batch_size = static_cast<std::size_t>(config.batch_size);
    const TaggerBackendConfig* bc =
        b < config.backends.size() ? &config.backends[b] : nullptr;
    if (bc && bc->batch_size > 0) {
      batch_size = static_cast<std::size_t>(bc->batch_size);
    }
    for (std::vector<std::string>& batch : plan_batches(pending, batch_size)) {
      WorkItem item;
      item.index = items.size();
      item.backend_index = b;
      item.paper_ids = std::move(batch);
      items.push_back(std::move(item));
    }
  }

  std::vector<std::optional<BatchResult>> results(items.size());
  std::mutex results_mutex;
  std::condition_variable results_ready;
  std::atomic<std::size_t> cursor{0};

  auto worker_loop = [&]() {
    while (true) {
      std::size_t index = cursor.fetch_add(1);
      if (index >= items.size()) return;
      const WorkItem& item = items[index];
      TaggerBackend& backend = *backends[item.backend_index];

      BatchResult result;
      try {
        std::vector<DocumentInput> inputs;
        inputs.reserve(item.paper_ids.size());
        for (const std::string& id : item.paper_ids) {
          DocumentInput input;
          input.paper_id = id;
          input.paragraphs = store.document_paragraphs(id, config.scope);
          inputs.push_back(std::move(input));
        }
        int attempts_left = config.retry_limit + 1;
        while (true) {
          try {
            std::vector<EntityMention> mentions = backend.tag_batch(inputs);
            for (const std::string& id : item.paper_ids) {
              result.per_paper[id];  // zero-mention documents still commit
            }
            for (EntityMention& m : mentions) {
              result.per_paper[m.paper_id].push_back(std::move(m));
            }
            for (auto& [id, list] : result.per_paper) {
              std::sort(list.begin(), list.end(), mention_less);
            }
            break;
          } catch (const std::exception& e) {
            if (--attempts_left > 0) continue;
            result.failed = true;
            result.error = e.what();
            break;
          }
        }
      } catch (const std::exception& e) {
        result.failed = true;
        result.error = e.what();
        result.per_paper.clear();
      } catch (...) {
        result.failed = true;
        result.error = "unknown error";
        result.per_paper.clear();
      }
      {
        std::lock_guard<std::mutex> lock(results_mutex);
        results[index] = std::move(result);
      }
      results_ready.notify_all();
    }
  };

  std::vector<std::thread> threads;
  std::size_t thread_count =
      std::min<std::size_t>(static_cast<std::size_t>(config.workers),
                            std::max<std::size_t>(items.size(), 1));
  threads.reserve(thread_count);
  for (std::size_t i = 0; i < thread_count; ++i) {
    threads.emplace_back(worker_loop);
  }

  // Commit strictly in work-item order, by document id within each batch, so
  // the persisted state never depends on completion order.
  std::size_t failed_batches = 0;
  for (std::size_t k = 0; k < items.size(); ++k) {
    BatchResult result;
    {
      std::unique_lock<std::mutex> lock(results_mutex);
      results_ready.wait(lock, [&] { return results[k].has_value(); });
      result = std::move(*results[k]);
      results[k].reset();
    }
    const WorkItem& item = items[k];
    const auto& backend = backends[item.backend_index];
    if (result.failed) {
      ++failed_batches;
      report.documents_failed += item.paper_ids.size();
      report.failures.push_back({item.index, backend->name(),
                                 item.paper_ids.size(), result.error});
      continue;
    }
    for (auto& [paper_id, mentions] : result.per_paper) {
      try {
        std::array<std::size_t, 4> inserted = store.commit_document_results(
            report.run_id, paper_id, backend->name(),
            fingerprints[item.backend_index], mentions);
        for (std::size_t t = 0; t < inserted.size(); ++t) {
          report.mentions_per_type[t] += inserted[t];
        }
        ++report.documents_processed;
      } catch (const StoreError& e) {
        ++report.documents_failed;
        report.failures.push_back({item.index, backend->name(), 1, e.what()});
      }
    }
  }

  for (std::thread& t : threads) {
    t.join();
  }
  store.finish_run(report.run_id);
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                    start_time)
          .count();
  if (!items.empty() && failed_batches == items.size()) {
    throw PipelineError("every batch failed; first error: " +
                        report.failures.front().error);
  }
  return report;
}

}  // namespace cordtag
