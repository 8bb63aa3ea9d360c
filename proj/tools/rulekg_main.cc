// rulekg: mine -> ground -> train -> eval.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rulekg/evaluator.h"
#include "rulekg/graph.h"
#include "rulekg/miner.h"
#include "rulekg/model.h"
#include "rulekg/random.h"
#include "rulekg/rule_io.h"
#include "rulekg/trainer.h"

namespace fs = std::filesystem;
using namespace rulekg;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string train, valid, test;
  std::string columns = "hrt";
  std::string model = "transe";
  int dim = 50;
  double margin = 2.0;
  double lr = 0.01;
  double lr2 = 0.01;
  std::string norm = "l1";
  int epochs = 1000;
  int epochs2 = 1000;
  int batch = 1;
  double tau1 = 0.5, tau2 = 0.6, tau3 = 0.5;
  std::int64_t min_support = 2;
  std::string mode = "rule";
  std::string grounding = "novel";
  std::uint64_t seed = 1;
  std::string out = "out";
  int threads = 1;
  std::string task = "both";
  std::string setting = "both";
  std::string rules, grounds, checkpoint, init, tie = "optimistic", tc_protocol = "1:10";
  int checkpoint_every = 0;
  bool rank_dump = false;
};

void AddData(CLI::App* app, RunConfig& c, bool need_splits) {
  app->set_config("--config", "", "flat key=value file; flags override it");
  auto* train = app->add_option("--train", c.train, "training triples")->check(CLI::ExistingFile);
  train->required();
  auto* valid = app->add_option("--valid", c.valid, "validation triples")->check(CLI::ExistingFile);
  auto* test = app->add_option("--test", c.test, "test triples")->check(CLI::ExistingFile);
  if (need_splits) {
    valid->required();
    test->required();
  }
  app->add_option("--columns", c.columns, "field order of the triple files")
      ->check(CLI::IsMember({"hrt", "htr", "rht", "rth", "thr", "trh"}));
  app->add_option("--seed", c.seed, "run seed");
  app->add_option("--out", c.out, "output directory");
}

void AddMining(CLI::App* app, RunConfig& c) {
  app->add_option("--tau1", c.tau1, "inference threshold")->check(CLI::Range(0.0, 1.0));
  app->add_option("--tau2", c.tau2, "transitivity threshold")->check(CLI::Range(0.0, 1.0));
  app->add_option("--tau3", c.tau3, "antisymmetry threshold")->check(CLI::Range(0.0, 1.0));
  app->add_option("--min-support", c.min_support, "minimum transitivity support")
      ->check(CLI::NonNegativeNumber);
  app->add_option("--grounding", c.grounding, "novel: only instances with a missing consequent")
      ->check(CLI::IsMember({"novel", "all"}));
}

void AddModel(CLI::App* app, RunConfig& c) {
  app->add_option("--model", c.model)->check(CLI::IsMember({"transe", "transh", "transr"}));
  app->add_option("--dim", c.dim)->check(CLI::PositiveNumber);
  app->add_option("--norm", c.norm)->check(CLI::IsMember({"l1", "l2"}));
  app->add_option("--threads", c.threads)->check(CLI::PositiveNumber);
}

DatasetSplits Load(const RunConfig& c) {
  const ColumnOrder order = ParseColumnOrder(c.columns);
  if (c.valid.empty() || c.test.empty()) {
    std::ifstream train(c.train);
    std::istringstream none;
    std::istringstream none2;
    return LoadSplits(train, none, none2, order);
  }
  return LoadSplitFiles(c.train, c.valid, c.test, order);
}

MinerConfig MinerOf(const RunConfig& c) {
  MinerConfig m;
  m.tau = {c.tau1, c.tau2, c.tau3};
  m.min_transitivity_support = c.min_support;
  return m;
}

GroundingMode GroundingOf(const RunConfig& c) {
  return c.grounding == "all" ? GroundingMode::kAll : GroundingMode::kNovel;
}

TrainConfig TrainConfigOf(const RunConfig& c) {
  TrainConfig t;
  t.kind = ParseModelKind(c.model);
  t.dim = c.dim;
  t.margin = c.margin;
  t.learning_rate = c.lr;
  t.learning_rate2 = c.lr2;
  t.norm = ParseNorm(c.norm);
  t.epochs = c.epochs;
  t.epochs2 = c.epochs2;
  t.batch_size = c.batch;
  t.seed = c.seed;
  t.threads = c.threads;
  ValidateConfig(t);
  return t;
}

std::ofstream OpenOut(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::ifstream OpenIn(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  return in;
}

void PrintCounts(std::ostream& out, const char* what, const std::array<std::size_t, 3>& counts) {
  out << what << ": inference " << counts[0] << ", transitivity " << counts[1]
      << ", antisymmetry " << counts[2] << '\n';
}

std::vector<Rule> RulesFor(const RunConfig& c, const KnowledgeGraph& graph,
                           const ConceptHierarchy& hierarchy) {
  if (!c.rules.empty()) {
    auto in = OpenIn(c.rules);
    return ReadRules(in, graph.relations(), hierarchy);
  }
  return MineRules(graph, MinerOf(c));
}

int CmdMine(const RunConfig& c) {
  const DatasetSplits splits = Load(c);
  const auto start = std::chrono::steady_clock::now();
  MiningReport report;
  const std::vector<Rule> rules = MineRules(splits.train, MinerOf(c), &report);
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
  fs::create_directories(c.out);
  auto out = OpenOut(fs::path(c.out) / "rules.tsv");
  WriteRules(out, rules, splits.train.relations());
  auto stats = OpenOut(fs::path(c.out) / "mining_stats.txt");
  for (std::ostream* s : {static_cast<std::ostream*>(&stats), static_cast<std::ostream*>(&std::cout)}) {
    PrintCounts(*s, "candidates", report.candidates);
    PrintCounts(*s, "rules", CountByType(rules));
  }
  std::cout << "mined in " << elapsed.count() << " s, wrote " << (fs::path(c.out) / "rules.tsv")
            << '\n';
  return 0;
}

int CmdGround(const RunConfig& c) {
  const DatasetSplits splits = Load(c);
  const ConceptHierarchy hierarchy(splits.train.relations());
  const std::vector<Rule> rules = RulesFor(c, splits.train, hierarchy);
  const std::vector<GroundRule> grounds = Ground(rules, splits.train, GroundingOf(c));
  fs::create_directories(c.out);
  auto out = OpenOut(fs::path(c.out) / "grounds.tsv");
  WriteGroundRules(out, grounds, splits.train.entities(), splits.train.relations(), hierarchy);
  PrintCounts(std::cout, "ground rules", CountByType(grounds));
  return 0;
}

int CmdTrain(const RunConfig& c) {
  const TrainConfig config = TrainConfigOf(c);
  if (c.mode == "baseline" && (!c.rules.empty() || !c.grounds.empty())) {
    throw UsageError("--mode baseline takes no rules or ground rules");
  }
  const DatasetSplits splits = Load(c);
  const ConceptHierarchy hierarchy(splits.train.relations());

  KnowledgeGraph graph = splits.train;
  std::vector<GroundRule> grounds;
  if (c.mode == "pre") {
    const std::vector<Rule> rules = RulesFor(c, splits.train, hierarchy);
    std::vector<Triple> augmented = splits.train.triples();
    const std::vector<Triple> inferred = InferredTriples(rules, splits.train);
    augmented.insert(augmented.end(), inferred.begin(), inferred.end());
    graph = BuildGraph(augmented, splits.train.shared_entities(), splits.train.shared_relations());
    std::cout << "added " << inferred.size() << " rule-inferred triples\n";
  } else if (c.mode == "rule") {
    if (!c.grounds.empty()) {
      auto in = OpenIn(c.grounds);
      grounds = ReadGroundRules(in, splits.train.entities(), splits.train.relations(), hierarchy);
    } else {
      grounds = Ground(RulesFor(c, splits.train, hierarchy), splits.train, GroundingOf(c));
    }
    PrintCounts(std::cout, "ground rules", CountByType(grounds));
  }

  fs::create_directories(c.out);
  const fs::path out_dir(c.out);
  auto log = OpenOut(out_dir / "train_log.csv");
  log << "epoch,phase,mean_loss,seconds\n";
  auto save = [&](const ModelParams& params, const fs::path& path) {
    auto out = OpenOut(path);
    SaveParams(out, params, splits.train.entities(), splits.train.relations(), hierarchy);
  };
  std::optional<ModelParams> init;
  if (!c.init.empty()) {
    auto in = OpenIn(c.init);
    init = LoadParams(in, splits.train.entities(), splits.train.relations(), hierarchy);
    if (init->kind() != config.kind || init->dim() != config.dim) {
      throw UsageError("--init holds " + std::string(ModelKindName(init->kind())) + " d=" +
                       std::to_string(init->dim()) + " but the run is configured for " + c.model +
                       " d=" + std::to_string(c.dim));
    }
  }
  const EpochCallback on_epoch = [&](const EpochLog& e, const ModelParams& p) {
        log << e.epoch << ',' << e.phase << ',' << FormatDouble(e.mean_loss) << ','
            << FormatDouble(e.seconds) << '\n';
        if (c.checkpoint_every > 0 && e.epoch % c.checkpoint_every == 0) {
          save(p, out_dir / ("checkpoint_p" + std::to_string(e.phase) + "_e" +
                             std::to_string(e.epoch) + ".txt"));
        }
        if (e.epoch % 100 == 0) {
          std::cerr << "phase " << e.phase << " epoch " << e.epoch << " loss " << e.mean_loss
                    << '\n';
        }
      };
  const ModelParams params = init ? Train(std::move(*init), graph, grounds, config, on_epoch)
                                  : Train(graph, grounds, config, on_epoch);
  save(params, out_dir / "model.txt");
  std::cout << "wrote " << (out_dir / "model.txt") << '\n';
  return 0;
}

int CmdEval(const RunConfig& c, bool model_given, bool dim_given) {
  const Norm norm = ParseNorm(c.norm);
  const DatasetSplits splits = Load(c);
  if (splits.test.empty()) throw UsageError("--test has no triples");
  const ConceptHierarchy hierarchy(splits.train.relations());
  auto in = OpenIn(c.checkpoint);
  const ModelParams params =
      LoadParams(in, splits.train.entities(), splits.train.relations(), hierarchy);
  if (dim_given && params.dim() != c.dim) {
    throw UsageError("checkpoint has dimension " + std::to_string(params.dim()) +
                     " but --dim is " + std::to_string(c.dim));
  }
  if (model_given && params.kind() != ParseModelKind(c.model)) {
    throw UsageError("checkpoint holds " + std::string(ModelKindName(params.kind())) +
                     " but --model is " + c.model);
  }
  const KnowledgeGraph known = KnownTriples(splits);
  std::vector<MetricRow> rows;
  std::vector<LPMetrics> lp;
  std::vector<RankResult> ranks;
  if (c.task != "tc") {
    ranks = RankAll(params, splits.test, known, norm, c.threads,
                    c.tie == "pessimistic" ? TieRule::kPessimistic : TieRule::kOptimistic);
    for (Setting s : {Setting::kRaw, Setting::kFiltered}) {
      if (c.setting != "both" && c.setting != SettingName(s)) continue;
      lp.push_back(AggregateRanks(ranks, s));
      for (auto& row : MetricRows(lp.back())) rows.push_back(row);
    }
  }
  TCMetrics tc;
  ThresholdTable thresholds;
  std::size_t fallbacks = 0;
  const bool do_tc = c.task != "lp";
  if (do_tc) {
    if (splits.valid.empty()) throw UsageError("triple classification needs --valid");
    const TcProtocol protocol = c.tc_protocol == "1:1" ? TcProtocol::kOneToOne : TcProtocol::kOneToTen;
    Rng valid_rng(DeriveSeed(c.seed, "tc-valid"));
    Rng test_rng(DeriveSeed(c.seed, "tc-test"));
    const auto valid = GenerateTcNegatives(splits.valid, known, valid_rng, protocol, &fallbacks);
    const auto test = GenerateTcNegatives(splits.test, known, test_rng, protocol, &fallbacks);
    thresholds = FitThresholds(params, valid, norm);
    tc = TripleClassification(params, thresholds, test, norm);
    rows.push_back({"tc_accuracy", "test", tc.accuracy});
  }

  fs::create_directories(c.out);
  const fs::path out_dir(c.out);
  auto csv = OpenOut(out_dir / "metrics.csv");
  WriteMetricsCsv(csv, rows);
  auto table = OpenOut(out_dir / "metrics.txt");
  WriteMetricsTable(table, lp, do_tc ? &tc : nullptr);
  WriteMetricsTable(std::cout, lp, do_tc ? &tc : nullptr);
  if (do_tc) {
    auto sigma = OpenOut(out_dir / "thresholds.tsv");
    std::map<RelationId, double> sorted(thresholds.sigma.begin(), thresholds.sigma.end());
    sigma << "*\t" << FormatDouble(thresholds.default_sigma) << '\n';
    for (const auto& [r, s] : sorted) {
      sigma << splits.train.relations().Label(r) << '\t' << FormatDouble(s) << '\n';
    }
    if (fallbacks > 0) {
      std::cerr << fallbacks << " negative draws fell back to unconstrained entities\n";
    }
  }
  if (c.rank_dump && !ranks.empty()) {
    auto dump = OpenOut(out_dir / "ranks.csv");
    WriteRankDump(dump, ranks, splits.train.entities(), splits.train.relations());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rule mining and rule-enhanced translation embeddings for knowledge graphs"};
  app.require_subcommand(1);
  RunConfig c;

  auto* mine = app.add_subcommand("mine", "mine rules from the training triples");
  AddData(mine, c, false);
  AddMining(mine, c);

  auto* ground = app.add_subcommand("ground", "ground rules over the training triples");
  AddData(ground, c, false);
  AddMining(ground, c);
  ground->add_option("--rules", c.rules, "rule file; mined on the fly when absent")
      ->check(CLI::ExistingFile);

  auto* train = app.add_subcommand("train", "train an embedding model");
  AddData(train, c, false);
  AddMining(train, c);
  AddModel(train, c);
  train->add_option("--margin", c.margin)->check(CLI::PositiveNumber);
  train->add_option("--lr", c.lr, "phase-1 learning rate")->check(CLI::NonNegativeNumber);
  train->add_option("--lr2", c.lr2, "phase-2 learning rate")->check(CLI::NonNegativeNumber);
  train->add_option("--epochs", c.epochs, "phase-1 epochs")->check(CLI::NonNegativeNumber);
  train->add_option("--epochs2", c.epochs2, "phase-2 epochs")->check(CLI::NonNegativeNumber);
  train->add_option("--batch", c.batch, "mini-batch size")->check(CLI::PositiveNumber);
  train->add_option("--mode", c.mode)->check(CLI::IsMember({"baseline", "pre", "rule"}));
  train->add_option("--rules", c.rules, "rule file for --mode pre/rule")->check(CLI::ExistingFile);
  train->add_option("--grounds", c.grounds, "ground-rule file for --mode rule")
      ->check(CLI::ExistingFile);
  train->add_option("--init", c.init, "start from this checkpoint instead of random vectors")
      ->check(CLI::ExistingFile);
  train->add_option("--checkpoint-every", c.checkpoint_every, "epochs between checkpoints")
      ->check(CLI::NonNegativeNumber);

  auto* eval = app.add_subcommand("eval", "link prediction and triple classification");
  AddData(eval, c, true);
  AddModel(eval, c);
  eval->add_option("--checkpoint", c.checkpoint, "trained model")
      ->required()
      ->check(CLI::ExistingFile);
  eval->add_option("--task", c.task)->check(CLI::IsMember({"lp", "tc", "both"}));
  eval->add_option("--setting", c.setting)->check(CLI::IsMember({"raw", "filtered", "both"}));
  eval->add_option("--ties", c.tie)->check(CLI::IsMember({"optimistic", "pessimistic"}));
  eval->add_option("--tc-protocol", c.tc_protocol)->check(CLI::IsMember({"1:10", "1:1"}));
  eval->add_flag("--rank-dump", c.rank_dump, "write per-triple ranks to ranks.csv");

  CLI11_PARSE(app, argc, argv);
  try {
    if (mine->parsed()) return CmdMine(c);
    if (ground->parsed()) return CmdGround(c);
    if (train->parsed()) return CmdTrain(c);
    return CmdEval(c, eval->count("--model") > 0, eval->count("--dim") > 0);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
