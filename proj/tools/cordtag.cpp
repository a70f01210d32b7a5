// cordtag: annotate document collections with biomedical entity mentions.
//
//   cordtag ingest <dir>                        load CORD-19 JSON parses
//   cordtag tag --config <file>                 run the tagging pipeline
//   cordtag export --scope S --format F --out P write mention dumps
//   cordtag stats                               mention counts per type/scope
//   cordtag validate <dump.json>                re-check a JSON dump

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cordtag/export.hpp"
#include "cordtag/ingest.hpp"
#include "cordtag/pipeline.hpp"
#include "cordtag/store.hpp"

namespace {

void print_ingest_report(const cordtag::IngestReport& report) {
  std::cout << "ingested: " << report.ingested << "\n"
            << "failed:   " << report.failed << "\n"
            << "duplicates: " << report.duplicates << "\n";
  for (const std::string& msg : report.messages) {
    std::cout << "  " << msg << "\n";
  }
}

void print_run_report(const cordtag::RunReport& report) {
  std::cout << "run id:    " << report.run_id << "\n"
            << "processed: " << report.documents_processed << "\n"
            << "skipped:   " << report.documents_skipped << "\n"
            << "failed:    " << report.documents_failed << "\n";
  std::cout << "new mentions:";
  for (std::size_t i = 0; i < report.mentions_per_type.size(); ++i) {
    std::cout << " " << cordtag::to_string(cordtag::kAllEntityTypes[i]) << "="
              << report.mentions_per_type[i];
  }
  std::cout << "\nwall time: " << report.wall_seconds << "s\n";
  for (const cordtag::BatchFailure& failure : report.failures) {
    std::cout << "batch " << failure.batch_index << " (" << failure.backend
              << ", " << failure.documents << " docs) failed: " << failure.error
              << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Biomedical entity mention annotation pipeline"};
  app.require_subcommand(1);

  std::string db_path = "cordtag.db";
  app.add_option("--db", db_path, "Database file")->capture_default_str();

  std::string ingest_dir;
  CLI::App* ingest = app.add_subcommand(
      "ingest", "Load a directory of CORD-19 JSON parses into the store");
  ingest->add_option("dir", ingest_dir, "Directory of *.json parse files")
      ->required();

  std::string config_path;
  CLI::App* tag =
      app.add_subcommand("tag", "Run the tagging pipeline over the store");
  tag->add_option("--config", config_path, "Pipeline config file")->required();

  std::string scope_name = "fulltext";
  std::string format = "json";
  std::string out_path;
  std::size_t docs_per_file = 100;
  CLI::App* exp = app.add_subcommand("export", "Export annotated mentions");
  exp->add_option("--scope", scope_name, "abstracts or fulltext")
      ->check(CLI::IsMember({"abstracts", "fulltext"}))
      ->capture_default_str();
  exp->add_option("--format", format, "json or pubtator")
      ->check(CLI::IsMember({"json", "pubtator"}))
      ->capture_default_str();
  exp->add_option("--out", out_path,
                  "Output file (json) or directory (pubtator)")
      ->required();
  exp->add_option("--docs-per-file", docs_per_file,
                  "Documents per composed PubTator file")
      ->capture_default_str();

  CLI::App* stats =
      app.add_subcommand("stats", "Print mention counts per type and scope");

  std::string dump_path;
  CLI::App* validate = app.add_subcommand(
      "validate", "Re-check a JSON dump's schema and span integrity");
  validate->add_option("dump", dump_path, "Dump file to validate")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    cordtag::Store store(db_path);

    if (ingest->parsed()) {
      cordtag::IngestReport report =
          cordtag::ingest_collection(ingest_dir, store);
      print_ingest_report(report);
      return 0;
    }
    if (tag->parsed()) {
      cordtag::PipelineConfig config =
          cordtag::load_pipeline_config(config_path);
      cordtag::RunReport report = cordtag::run_pipeline(config, store);
      print_run_report(report);
      return 0;
    }
    if (exp->parsed()) {
      cordtag::Scope scope = *cordtag::scope_from_string(scope_name);
      if (format == "json") {
        std::uint64_t count = cordtag::export_json(store, scope, out_path);
        std::cout << "wrote " << count << " mentions to " << out_path << "\n";
      } else {
        std::size_t files =
            cordtag::export_pubtator(store, scope, out_path, docs_per_file);
        std::cout << "wrote " << files << " files to " << out_path << "\n";
      }
      return 0;
    }
    if (stats->parsed()) {
      std::cout << cordtag::render_stats(cordtag::compute_stats(store));
      return 0;
    }
    if (validate->parsed()) {
      std::vector<cordtag::ValidationIssue> issues =
          cordtag::validate_dump(dump_path, store);
      if (issues.empty()) {
        std::cout << "dump is valid\n";
        return 0;
      }
      std::cerr << issues.size() << " issue(s) found\n";
      std::size_t shown = 0;
      for (const cordtag::ValidationIssue& issue : issues) {
        if (++shown > 20) {
          std::cerr << "  ...\n";
          break;
        }
        std::cerr << "  " << issue.paper_id << " record "
                  << issue.record_index << ": " << issue.message << "\n";
      }
      return 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
