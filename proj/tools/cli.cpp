#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "ecoreport/anova.hpp"
#include "ecoreport/corpus.hpp"
#include "ecoreport/criteria.hpp"
#include "ecoreport/error.hpp"
#include "ecoreport/mda.hpp"
#include "ecoreport/miner.hpp"
#include "ecoreport/report.hpp"
#include "ecoreport/scoring.hpp"
#include "ecoreport/sem.hpp"
#include "ecoreport/text.hpp"

namespace ecoreport::cli {
namespace fs = std::filesystem;

namespace {

// Carries "<module>: <class>: <message>" out of a failed stage.
struct StageFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string_view error_class(const std::exception& e) {
  if (dynamic_cast<const IngestionError*>(&e)) return "ingestion error";
  if (dynamic_cast<const ValidationError*>(&e)) return "validation error";
  if (dynamic_cast<const PreconditionError*>(&e)) return "precondition error";
  if (dynamic_cast<const SingularityError*>(&e)) return "singular matrix";
  if (dynamic_cast<const ConditioningError*>(&e)) return "conditioning error";
  if (dynamic_cast<const DegenerateVarianceError*>(&e)) return "degenerate variance";
  if (dynamic_cast<const BoundsError*>(&e)) return "bounds error";
  return "error";
}

template <class F>
auto stage(std::string_view module, F&& f) {
  try {
    return f();
  } catch (const StageFailure&) {
    throw;
  } catch (const std::exception& e) {
    throw StageFailure(fmt::format("{}: {}: {}", module, error_class(e), e.what()));
  }
}

void require_file(const fs::path& p, std::string_view what) {
  if (p.empty()) throw ValidationError(fmt::format("{} path is required", what));
  if (!fs::is_regular_file(p))
    throw IngestionError(fmt::format("{} not found: {}", what, p.string()));
}

fs::path frequencies_path(const RunConfig& c) {
  return c.frequencies.empty() ? c.out / "frequencies.csv" : c.frequencies;
}
fs::path sample_path(const RunConfig& c) {
  return c.sample.empty() ? c.out / "sample.csv" : c.sample;
}

unsigned thread_count(const RunConfig& c) {
  if (c.threads != 0) return c.threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

// Everything a stage reads, checked before any work starts.
void validate_inputs(const RunConfig& c, std::string_view cmd) {
  const bool mines = cmd == "mine" || cmd == "pipeline";
  if (mines || cmd == "score") require_file(c.manifest, "manifest");
  if (!c.criteria.empty()) require_file(c.criteria, "criteria config");
  if (!c.stoplist.empty()) require_file(c.stoplist, "stop list");
  if (cmd == "sem") require_file(c.model, "SEM model");
  if (cmd == "pipeline" && !c.model.empty()) require_file(c.model, "SEM model");
  if (cmd == "score") require_file(frequencies_path(c), "frequency table");
  if (cmd == "anova" || cmd == "mda" || cmd == "sem") require_file(sample_path(c), "sample");
  if (!c.root.empty() && !fs::is_directory(c.root))
    throw IngestionError("corpus root is not a directory: " + c.root.string());
}

CriteriaSet criteria_of(const RunConfig& c) {
  return c.criteria.empty() ? default_criteria() : load_criteria(c.criteria);
}

std::vector<ManifestRow> manifest_of(const RunConfig& c) { return read_manifest(c.manifest); }

// --- stages ---------------------------------------------------------------

FrequencyTable run_mine(const RunConfig& c, std::ostream& out) {
  return stage("corpus_miner", [&] {
    const auto rows = manifest_of(c);
    const fs::path root = c.root.empty() ? c.manifest.parent_path() : c.root;
    const Corpus corpus = load_corpus(root, rows);
    const CriteriaSet criteria = criteria_of(c);
    StopList stoplist;
    if (!c.match_before_stoplist)
      stoplist = c.stoplist.empty() ? StopList::english_default() : StopList::load(c.stoplist);

    FrequencyTable table;
    if (c.strategy == "binary") {
      const KeywordFile kw = build_sorted_keyword_file(corpus, stoplist, c.stemming);
      write_keyword_file(c.out / "keywords.tsv", kw);
      table = mine_binary(kw, corpus, criteria, thread_count(c));
    } else {
      table = mine_linear(corpus, criteria, stoplist, c.stemming, thread_count(c));
    }
    write_frequency_csv(c.out / "frequencies.csv", table);
    out << fmt::format("mine: {} reports x {} criteria ({} search) -> {}\n",
                       table.report_ids().size(), table.criterion_ids().size(), c.strategy,
                       (c.out / "frequencies.csv").string());
    return table;
  });
}

std::vector<ScoreCard> run_score(const RunConfig& c, const FrequencyTable& freq,
                                 std::ostream& out) {
  return stage("criteria_scoring", [&] {
    const CorpusMeta meta = corpus_meta(manifest_of(c));
    const auto cards = build_scorecards(freq, meta, criteria_of(c));
    FilterOptions opts;
    opts.analysis_language = c.language;
    opts.rule = c.elimination == "disjunction" ? EliminationRule::disjunction
                                               : EliminationRule::conjunction;
    const auto sample = filter_sample(cards, meta, opts);
    write_scorecard_csv(c.out / "scorecards.csv", cards);
    write_scorecard_csv(c.out / "sample.csv", sample);
    out << fmt::format("score: {} scorecards, {} in the analysis sample -> {}\n", cards.size(),
                       sample.size(), (c.out / "sample.csv").string());
    return sample;
  });
}

std::vector<AnovaRow> run_anova(const RunConfig& c, const std::vector<ScoreCard>& sample,
                                std::ostream& out) {
  return stage("anova", [&] {
    auto rows = anova_table(sample);
    write_anova_csv(c.out / "anova.csv", rows);
    std::size_t significant = 0;
    for (const auto& r : rows) significant += r.significant_at_05;
    out << fmt::format("anova: {} variables, {} significant at 5% -> {}\n", rows.size(),
                       significant, (c.out / "anova.csv").string());
    return rows;
  });
}

MdaResult run_mda_stage(const RunConfig& c, const std::vector<ScoreCard>& sample,
                        std::ostream& out) {
  return stage("mda", [&] {
    const GroupedData data = grouped_scores(sample);
    MdaResult result = run_mda(data);
    const MdaModel model = fit_mda(data);
    write_mda_json(c.out / "mda.json", result);
    write_case_scores_csv(c.out / "case_scores.csv", project_cases(data, model), model);
    out << fmt::format("mda: {} functions, hit rate {} -> {}\n", result.eigenvalues.size(),
                       format_percent(result.classification.hit_rate),
                       (c.out / "mda.json").string());
    return result;
  });
}

SemResult run_sem(const RunConfig& c, const std::vector<ScoreCard>& sample, std::ostream& out) {
  return stage("sem", [&] {
    const SemModelSpec model = load_model(c.model);
    if (sample.empty()) throw ValidationError("the analysis sample is empty");
    const auto& ids = sample.front().criterion_ids;
    Matrix x(sample.size(), model.observed.size());
    for (std::size_t j = 0; j < model.observed.size(); ++j) {
      const auto it = std::find(ids.begin(), ids.end(), model.observed[j]);
      if (it == ids.end())
        throw ValidationError("model variable '" + model.observed[j] +
                              "' is not a criterion of the sample");
      const auto col = static_cast<std::size_t>(it - ids.begin());
      for (std::size_t i = 0; i < sample.size(); ++i) x(i, j) = sample[i].scores[col];
    }
    const Matrix s = sample_covariance(x);
    SemResult result;
    result.fit = fit_model(model, s, sample.size());
    if (result.fit.converged) result.standardized = standardized_estimates(result.fit, model, s);
    write_sem_json(c.out / "sem.json", result);
    out << fmt::format("sem: chi-square {:.3f} (df {}), p {}, {} -> {}\n",
                       result.fit.chi_square, result.fit.df,
                       std::isnan(result.fit.p) ? "NA" : fmt::format("{:.3f}", result.fit.p),
                       result.fit.converged ? "converged" : "NOT converged",
                       (c.out / "sem.json").string());
    return result;
  });
}

void run_report(const RunConfig& c, const ResultsBundle& bundle, std::ostream& out) {
  stage("report", [&] {
    write_report(c.out / "report.txt", bundle);
    out << fmt::format("report: -> {}\n", (c.out / "report.txt").string());
  });
}

ResultsBundle bundle_from_files(const RunConfig& c) {
  return stage("report", [&] {
    ResultsBundle b;
    if (fs::is_regular_file(sample_path(c)))
      b.composition = sector_composition(read_scorecard_csv(sample_path(c)));
    if (fs::is_regular_file(c.out / "anova.csv")) b.anova = read_anova_csv(c.out / "anova.csv");
    if (fs::is_regular_file(c.out / "mda.json")) b.mda = read_mda_json(c.out / "mda.json");
    if (fs::is_regular_file(c.out / "sem.json")) b.sem = read_sem_json(c.out / "sem.json");
    return b;
  });
}

std::vector<ScoreCard> load_sample(const RunConfig& c) {
  return stage("criteria_scoring", [&] { return read_scorecard_csv(sample_path(c)); });
}

void dispatch(const std::string& cmd, const RunConfig& c, std::ostream& out) {
  stage("cli", [&] { validate_inputs(c, cmd); });
  if (cmd == "mine") {
    run_mine(c, out);
  } else if (cmd == "score") {
    const auto freq = stage("criteria_scoring", [&] { return read_frequency_csv(frequencies_path(c)); });
    run_score(c, freq, out);
  } else if (cmd == "anova") {
    run_anova(c, load_sample(c), out);
  } else if (cmd == "mda") {
    run_mda_stage(c, load_sample(c), out);
  } else if (cmd == "sem") {
    run_sem(c, load_sample(c), out);
  } else if (cmd == "report") {
    run_report(c, bundle_from_files(c), out);
  } else if (cmd == "pipeline") {
    const auto freq = run_mine(c, out);
    const auto sample = run_score(c, freq, out);
    ResultsBundle bundle;
    bundle.composition = stage("criteria_scoring", [&] { return sector_composition(sample); });
    bundle.anova = run_anova(c, sample, out);
    bundle.mda = run_mda_stage(c, sample, out);
    if (!c.model.empty()) bundle.sem = run_sem(c, sample, out);
    run_report(c, bundle, out);
  }
}

}  // namespace

int run_subcommand(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Corporate environmental report scoring and statistics", "ecoreport"};
  app.fallthrough();
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from an INI/TOML run config");

  RunConfig c;
  app.add_option("--manifest", c.manifest, "Corpus manifest CSV (report_id,sector,language,path)");
  app.add_option("--root", c.root, "Directory that relative manifest paths resolve against");
  app.add_option("--criteria", c.criteria, "Criteria config (default: built-in set)");
  app.add_option("--stoplist", c.stoplist, "Stop list, one word per line (default: built-in)");
  app.add_flag("--stemming", c.stemming, "Apply suffix stemming to tokens and phrases");
  app.add_flag("--match-before-stoplist", c.match_before_stoplist,
               "Match phrases against the token stream before stop-word removal");
  app.add_option("--strategy", c.strategy, "Mining strategy")
      ->check(CLI::IsMember({"linear", "binary"}));
  app.add_option("--threads", c.threads, "Mining worker threads (0 = all cores)");
  app.add_option("--elimination", c.elimination, "Report elimination rule")
      ->check(CLI::IsMember({"conjunction", "disjunction"}));
  app.add_option("--language", c.language, "Analysis language tag");
  app.add_option("--model", c.model, "SEM model config");
  app.add_option("--out", c.out, "Output directory");
  app.add_option("--frequencies", c.frequencies, "Frequency CSV for `score` (default: <out>/frequencies.csv)");
  app.add_option("--sample", c.sample, "Scorecard CSV for the analyses (default: <out>/sample.csv)");

  const std::vector<std::pair<const char*, const char*>> commands{
      {"mine", "Count criterion phrase occurrences per report"},
      {"score", "Rate frequencies and filter the analysis sample"},
      {"anova", "One-way ANOVA of each score across sectors"},
      {"mda", "Discriminant analysis of sector membership"},
      {"sem", "Fit the structural equation model"},
      {"pipeline", "mine -> score -> anova -> mda -> sem -> report"},
      {"report", "Summarize available results into report.txt"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  if (!args.empty() && !args.front().starts_with('-') &&
      std::none_of(commands.begin(), commands.end(),
                   [&](const auto& cmd) { return args.front() == cmd.first; })) {
    err << "error: unknown subcommand '" << args.front() << "'\n" << app.help();
    return 2;
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    if (!args.empty()) err << "error: " << e.what() << "\n";
    err << app.help();
    return 2;
  }

  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    dispatch(cmd, c, out);
  } catch (const StageFailure& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: cli: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace ecoreport::cli
