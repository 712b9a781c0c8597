/// @file  mnl_main.cpp
/// @brief Experiment CLI: desk-scale reproductions of the simulation studies
///        plus an ad-hoc fit over an observation file.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <mnl/estimator.hpp>
#include <mnl/experiments.hpp>
#include <mnl/jester.hpp>
#include <mnl/likelihood.hpp>
#include <mnl/linalg.hpp>
#include <mnl/metrics.hpp>
#include <mnl/observations.hpp>
#include <mnl/preference.hpp>

namespace {

namespace fs = std::filesystem;

std::vector<std::uint64_t> seedList(std::uint64_t base, std::size_t count,
                                    const std::vector<std::uint64_t>& explicitSeeds) {
  if (!explicitSeeds.empty()) return explicitSeeds;
  std::vector<std::uint64_t> seeds(count);
  for (std::size_t i = 0; i < count; ++i) seeds[i] = base + i;
  return seeds;
}

void writeTable(const mnl::ResultTable& table, const std::string& outDir,
                const std::string& name) {
  fs::create_directories(outDir);
  const fs::path path = fs::path(outDir) / name;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file " + path.string());
  table.writeCsv(out);
  std::cout << "wrote " << path.string() << " (" << table.rows.size() << " rows)\n";
}

void addCommonOptions(CLI::App* cmd, std::string& outDir, std::uint64_t& seed,
                      std::size_t& numSeeds, std::vector<std::uint64_t>& seeds, int& threads) {
  cmd->add_option("--out", outDir, "output directory")->capture_default_str();
  cmd->add_option("--seed", seed, "base seed")->capture_default_str();
  cmd->add_option("--num-seeds", numSeeds, "seeds used: seed, seed+1, ...")
      ->capture_default_str();
  cmd->add_option("--seeds", seeds, "explicit seed list (overrides --seed/--num-seeds)");
  cmd->add_option("--threads", threads, "worker threads (0 = hardware)")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Low-rank MNL preference estimation from ordinal data"};
  app.set_config("--config", "", "key=value config file");
  app.require_subcommand(1);

  std::string outDir = "results";
  std::uint64_t seed = 1;
  std::size_t numSeeds = 3;
  std::vector<std::uint64_t> seeds;
  int threads = 0;

  // graph-topology ----------------------------------------------------------
  auto* graphCmd = app.add_subcommand("graph-topology",
                                      "pairwise graph sampling: error versus n per topology");
  mnl::GraphTopologySpec graphSpec;
  std::string thetaKind = "iid";
  std::vector<std::string> topologyNames = {"complete", "star", "line", "barbell"};
  graphCmd->add_option("--d1", graphSpec.d1)->capture_default_str();
  graphCmd->add_option("--d2", graphSpec.d2)->capture_default_str();
  graphCmd->add_option("--rank", graphSpec.rank)->capture_default_str();
  graphCmd->add_option("--alpha", graphSpec.alpha)->capture_default_str();
  graphCmd->add_option("--theta-kind", thetaKind, "iid | barbell-biased | line-biased")
      ->capture_default_str();
  graphCmd->add_option("--topologies", topologyNames, "complete star line barbell");
  graphCmd->add_option("--n-grid", graphSpec.sampleGrid, "sample counts");
  std::string graphPolicy = "sampling-branch";
  graphCmd->add_option("--lambda-policy", graphPolicy, "sampling-branch | formula-max")
      ->capture_default_str();
  graphCmd->add_option("--lambda-scale", graphSpec.lambdaScale)->capture_default_str();
  graphCmd->add_option("--max-iters", graphSpec.maxIters)->capture_default_str();
  graphCmd->add_option("--tol", graphSpec.tol)->capture_default_str();
  addCommonOptions(graphCmd, outDir, seed, numSeeds, seeds, threads);

  // groups ------------------------------------------------------------------
  auto* groupsCmd =
      app.add_subcommand("groups", "joint versus separate inference over item groups");
  mnl::GroupSpec groupSpec;
  groupsCmd->add_option("--d1", groupSpec.d1)->capture_default_str();
  groupsCmd->add_option("--d2", groupSpec.d2)->capture_default_str();
  groupsCmd->add_option("--rank", groupSpec.rank)->capture_default_str();
  groupsCmd->add_option("--alpha", groupSpec.alpha)->capture_default_str();
  groupsCmd->add_option("--group-grid", groupSpec.groupGrid, "group counts, each dividing d2");
  groupsCmd->add_option("--n", groupSpec.samples)->capture_default_str();
  std::string groupPolicy = "sampling-branch";
  groupsCmd->add_option("--lambda-policy", groupPolicy, "sampling-branch | formula-max")
      ->capture_default_str();
  groupsCmd->add_option("--lambda-scale", groupSpec.lambdaScale)->capture_default_str();
  groupsCmd->add_option("--max-iters", groupSpec.maxIters)->capture_default_str();
  groupsCmd->add_option("--tol", groupSpec.tol)->capture_default_str();
  addCommonOptions(groupsCmd, outDir, seed, numSeeds, seeds, threads);

  // kwise -------------------------------------------------------------------
  auto* kwiseCmd = app.add_subcommand("kwise", "k-wise ranking error versus list length");
  mnl::KwiseSpec kwiseSpec;
  std::string kwisePolicy = "practical";
  kwiseCmd->add_option("--d", kwiseSpec.d)->capture_default_str();
  kwiseCmd->add_option("--rank-grid", kwiseSpec.rankGrid, "ranks");
  kwiseCmd->add_option("--alpha", kwiseSpec.alpha)->capture_default_str();
  kwiseCmd->add_option("--k-grid", kwiseSpec.kGrid, "list lengths");
  kwiseCmd->add_option("--lambda-policy", kwisePolicy, "practical | theory-low")
      ->capture_default_str();
  kwiseCmd->add_option("--lambda-scale", kwiseSpec.lambdaScale)->capture_default_str();
  kwiseCmd->add_option("--max-iters", kwiseSpec.maxIters)->capture_default_str();
  kwiseCmd->add_option("--tol", kwiseSpec.tol)->capture_default_str();
  addCommonOptions(kwiseCmd, outDir, seed, numSeeds, seeds, threads);

  // lambda-sweep -------------------------------------------------------------
  auto* sweepCmd = app.add_subcommand("lambda-sweep", "error versus lambda multiplier");
  mnl::LambdaSweepSpec sweepSpec;
  sweepCmd->add_option("--d", sweepSpec.d)->capture_default_str();
  sweepCmd->add_option("--rank", sweepSpec.rank)->capture_default_str();
  sweepCmd->add_option("--alpha-grid", sweepSpec.alphaGrid, "alpha values");
  sweepCmd->add_option("--k", sweepSpec.k)->capture_default_str();
  sweepCmd->add_option("--exponents", sweepSpec.multiplierExponents,
                       "lambda multiplier exponents (powers of two)");
  sweepCmd->add_option("--max-iters", sweepSpec.maxIters)->capture_default_str();
  sweepCmd->add_option("--tol", sweepSpec.tol)->capture_default_str();
  addCommonOptions(sweepCmd, outDir, seed, numSeeds, seeds, threads);

  // jester ------------------------------------------------------------------
  auto* jesterCmd =
      app.add_subcommand("jester", "held-out prediction: convex relaxation versus Borda");
  mnl::JesterSpec jesterSpec;
  std::string jesterPath;
  mnl::Index synthUsers = 400;
  jesterCmd->add_option("--data", jesterPath,
                        "Jester ratings CSV; omitted -> synthetic stand-in table");
  jesterCmd->add_option("--k-grid", jesterSpec.kGrid, "selected jokes per user");
  jesterCmd->add_option("--max-users", jesterSpec.maxUsers)->capture_default_str();
  jesterCmd->add_option("--synthetic-users", synthUsers)->capture_default_str();
  jesterCmd->add_option("--lambda-scale", jesterSpec.lambdaScale)->capture_default_str();
  jesterCmd->add_option("--max-iters", jesterSpec.maxIters)->capture_default_str();
  jesterCmd->add_option("--tol", jesterSpec.tol)->capture_default_str();
  addCommonOptions(jesterCmd, outDir, seed, numSeeds, seeds, threads);

  // fit ---------------------------------------------------------------------
  auto* fitCmd = app.add_subcommand("fit", "ad-hoc fit from an observation CSV");
  std::string fitData;
  std::string fitCentering = "per-row";
  std::string fitGraphPath;
  std::string fitTruthPath;
  double fitLambda = 0.0;
  double fitTol = 1e-8;
  mnl::Index fitMaxIters = 5000;
  std::string fitThetaOut = "theta.csv";
  std::string fitTraceOut = "trace.csv";
  fitCmd->add_option("--data", fitData, "observation CSV (see README for the format)")
      ->required();
  fitCmd->add_option("--lambda", fitLambda, "regularization weight")->required();
  fitCmd->add_option("--centering", fitCentering, "per-row | per-group | global | none")
      ->capture_default_str();
  fitCmd->add_option("--graph", fitGraphPath,
                     "edge-list file; fits the Laplacian-weighted norm (pairwise only)");
  fitCmd->add_option("--truth", fitTruthPath,
                     "reference preference CSV; writes error_report.csv against it");
  fitCmd->add_option("--max-iters", fitMaxIters)->capture_default_str();
  fitCmd->add_option("--tol", fitTol)->capture_default_str();
  fitCmd->add_option("--theta-out", fitThetaOut)->capture_default_str();
  fitCmd->add_option("--trace-out", fitTraceOut)->capture_default_str();
  fitCmd->add_option("--out", outDir, "output directory")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    const auto policyFromString = [](const std::string& s) {
      if (s == "sampling-branch") return mnl::GraphLambdaPolicy::SamplingBranch;
      if (s == "formula-max") return mnl::GraphLambdaPolicy::FormulaMax;
      throw std::runtime_error("unknown lambda policy: " + s);
    };
    if (graphCmd->parsed()) {
      graphSpec.thetaKind = mnl::thetaKindFromString(thetaKind);
      graphSpec.topologies.clear();
      for (const auto& name : topologyNames) {
        graphSpec.topologies.push_back(mnl::topologyFromString(name));
      }
      graphSpec.lambdaPolicy = policyFromString(graphPolicy);
      graphSpec.seeds = seedList(seed, numSeeds, seeds);
      graphSpec.threads = threads;
      writeTable(mnl::runGraphTopologyExperiment(graphSpec), outDir, "graph_topology.csv");
    } else if (groupsCmd->parsed()) {
      groupSpec.lambdaPolicy = policyFromString(groupPolicy);
      groupSpec.seeds = seedList(seed, numSeeds, seeds);
      groupSpec.threads = threads;
      writeTable(mnl::runGroupExperiment(groupSpec), outDir, "groups.csv");
    } else if (kwiseCmd->parsed()) {
      kwiseSpec.lambdaPolicy = kwisePolicy == "theory-low" ? mnl::KwiseLambdaPolicy::TheoryLow
                                                           : mnl::KwiseLambdaPolicy::Practical;
      kwiseSpec.seeds = seedList(seed, numSeeds, seeds);
      kwiseSpec.threads = threads;
      writeTable(mnl::runKwiseExperiment(kwiseSpec), outDir, "kwise.csv");
    } else if (sweepCmd->parsed()) {
      sweepSpec.seeds = seedList(seed, numSeeds, seeds);
      sweepSpec.threads = threads;
      writeTable(mnl::runLambdaSweep(sweepSpec), outDir, "lambda_sweep.csv");
    } else if (jesterCmd->parsed()) {
      jesterSpec.seed = seed;
      mnl::JesterTable table = jesterPath.empty()
                                   ? mnl::syntheticJesterTable(synthUsers, 100, seed)
                                   : mnl::loadJesterFile(jesterPath);
      writeTable(mnl::runJesterExperiment(table, jesterSpec), outDir, "jester.csv");
    } else if (fitCmd->parsed()) {
      std::ifstream in(fitData);
      if (!in) throw std::runtime_error("cannot open " + fitData);
      const mnl::ObservationSet obs = mnl::readObservations(in);

      mnl::EstimatorConfig cfg;
      cfg.lambda = fitLambda;
      cfg.maxIters = fitMaxIters;
      cfg.tol = fitTol;
      cfg.centering = mnl::centeringFromString(fitCentering);

      mnl::FitResult result;
      mnl::GroupStructure gs;
      mnl::Matrix lHalf;
      if (!fitGraphPath.empty()) {
        std::ifstream gin(fitGraphPath);
        if (!gin) throw std::runtime_error("cannot open " + fitGraphPath);
        const mnl::SamplingGraph graph = mnl::readEdgeList(gin);
        gs = mnl::groups(graph);
        const mnl::Matrix lap = mnl::laplacian(graph);
        lHalf = mnl::laplacianPower(lap, 0.5, gs.count());
        result = mnl::fitGraphWeighted(mnl::LossHandle::pairwise(obs), lap, gs, cfg);
      } else {
        mnl::LossHandle loss = [&]() {
          switch (obs.kind) {
            case mnl::ObservationKind::Pairwise: return mnl::LossHandle::pairwise(obs);
            case mnl::ObservationKind::Kwise: return mnl::LossHandle::kwise(obs);
            case mnl::ObservationKind::Choice: return mnl::LossHandle::choice(obs);
            case mnl::ObservationKind::Bundled: return mnl::LossHandle::bundled(obs);
          }
          throw std::runtime_error("unknown observation kind");
        }();
        if (cfg.centering == mnl::Centering::PerGroup) {
          throw std::runtime_error("per-group centering needs --graph");
        }
        result = mnl::fit(loss, cfg);
      }

      fs::create_directories(outDir);
      {
        std::ofstream out(fs::path(outDir) / fitThetaOut);
        mnl::writePreferenceCsv(out, result.thetaHat);
      }
      {
        std::ofstream out(fs::path(outDir) / fitTraceOut);
        mnl::writeTraceCsv(out, result);
      }
      if (!fitTruthPath.empty()) {
        std::ifstream tin(fitTruthPath);
        if (!tin) throw std::runtime_error("cannot open " + fitTruthPath);
        const mnl::PreferenceMatrix truth = mnl::readPreferenceCsv(tin);
        const mnl::ErrorReport report = mnl::makeErrorReport(
            result.thetaHat.theta, truth.theta, lHalf.size() ? &lHalf : nullptr);
        std::ofstream out(fs::path(outDir) / "error_report.csv");
        mnl::writeErrorReportCsv(out, report);
      }
      std::cout << "fit: iterations=" << result.iterations
                << " converged=" << (result.converged ? 1 : 0)
                << " objective=" << result.objectiveTrace.back()
                << " residual=" << result.fixedPointResidual << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error," << (app.get_subcommands().empty()
                                  ? "none"
                                  : app.get_subcommands().front()->get_name())
              << "," << e.what() << "\n";
    return 1;
  }
  return 0;
}
