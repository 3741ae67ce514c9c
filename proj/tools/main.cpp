// Command-line front end: preprocess, train, generate, eval, verify.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "equigan/chem/smiles.hpp"
#include "equigan/gan/checkpoint.hpp"
#include "equigan/gan/train.hpp"
#include "equigan/io/dataset.hpp"
#include "equigan/metrics/metrics.hpp"
#include "equigan/verify/stage_maps.hpp"

namespace {

using namespace equigan;

constexpr int kExitOk = 0;
constexpr int kExitFailed = 2;
constexpr int kExitAbort = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "' for reading");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// ---------------------------------------------------------------------------

struct PreprocessArgs {
  std::string input, output;
  int max_atoms = 9;
  std::size_t limit = 0;
};

int run_preprocess(const PreprocessArgs& a) {
  const auto lines = io::read_smiles_file(a.input);
  io::PreprocessReport report;
  io::Dataset data = io::preprocess(lines, a.max_atoms, report);
  std::cout << "lines: " << report.lines << "\nkept: " << report.kept << "\nskipped: " << report.skipped_total() << '\n';
  for (const auto& [reason, count] : report.skipped) std::cout << "skipped_" << reason << ": " << count << '\n';
  for (const auto& [line, message] : report.details) std::cerr << "line " << line << ": " << message << '\n';
  if (report.lines == 0 || 2 * report.skipped_total() > report.lines) {
    std::cerr << "error: more than half of the input was skipped\n";
    return kExitAbort;
  }
  if (a.limit > 0 && data.graphs.size() > a.limit) data.graphs.resize(a.limit);
  std::cout << "graphs: " << data.graphs.size() << "\nvocab_size: " << data.vocab->size() << '\n';
  if (data.vocab->size() != 21)
    std::cerr << "warning: atom vocabulary has " << data.vocab->size() << " entries, expected 21 for QM9\n";
  io::save_dataset(a.output, data);
  std::ofstream vocab(a.output + ".vocab");
  io::write_vocab(vocab, *data.vocab);
  io::save_certificates(a.output + ".certs", data.certificates());
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct TrainArgs {
  std::string stage, dataset, config, checkpoint, log;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
};

int run_train(const TrainArgs& a) {
  std::string text = a.config.empty() ? std::string() : read_file(a.config);
  text += "\nstage = " + a.stage + "\n";
  for (const auto& kv : a.overrides) text += kv + "\n";
  if (a.seed) text += "seed = " + std::to_string(*a.seed) + "\n";
  const gan::StageConfig config = gan::parse_config(text);
  std::cout << "# effective config\n" << gan::dump(config) << std::flush;

  const io::Dataset data = io::load_dataset(a.dataset);
  const std::string log_path = a.log.empty() ? a.checkpoint + ".log" : a.log;
  std::ofstream log(log_path);
  if (!log) throw Error(ErrorCode::IoError, "cannot open '" + log_path + "' for writing");

  gan::Checkpoint ck{config, {}, data.vocab->entries(), data.node_counts()};
  struct Observer : gan::TrainObserver {
    std::ofstream* log;
    gan::Checkpoint* ck;
    const std::string* path;
    void on_record(const gan::LogRecord& r) override {
      *log << gan::format_log(r) << '\n' << std::flush;
      std::cout << gan::format_log(r) << '\n' << std::flush;
    }
    void on_checkpoint(int, const gan::ModelParams& p) override {
      ck->params = p;
      gan::save_checkpoint(*path, *ck);
    }
  } observer;
  observer.log = &log;
  observer.ck = &ck;
  observer.path = &a.checkpoint;

  auto result = gan::train_stage(data, config, &observer);
  ck.params = std::move(result.params);
  gan::save_checkpoint(a.checkpoint, ck);
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct GenerateArgs {
  std::string stage1, stage2, stage3, skeletons = "data", dataset, output;
  std::size_t count = 1000;
  std::uint64_t seed = 1;
  bool sample = false;
  bool shared_z = false;
};

gan::StageModel to_model(const gan::Checkpoint& ck) { return {ck.config, ck.params}; }

int run_generate(const GenerateArgs& a) {
  const gan::Checkpoint c2 = gan::load_checkpoint(a.stage2);
  const gan::Checkpoint c3 = gan::load_checkpoint(a.stage3);
  if (c2.vocab != c3.vocab) throw Error(ErrorCode::BadCheckpoint, "stage 2 and stage 3 were trained on different vocabularies");
  const gan::StageModel m2 = to_model(c2), m3 = to_model(c3);
  gan::GenerateInputs in;
  in.vocab = std::make_shared<const AtomVocab>(c2.vocab);
  in.stage2 = &m2;
  in.stage3 = &m3;
  std::optional<gan::StageModel> m1;
  if (a.skeletons == "data") {
    if (a.dataset.empty()) throw Error(ErrorCode::EmptyInput, "--dataset is required for data skeletons");
    in.source = gan::SkeletonSource::Data;
    in.skeletons = io::load_dataset(a.dataset).skeletons();
  } else {
    if (a.stage1.empty()) throw Error(ErrorCode::UntrainedStage, "--stage1 is required for stage-1 skeletons");
    const gan::Checkpoint c1 = gan::load_checkpoint(a.stage1);
    m1 = to_model(c1);
    in.source = gan::SkeletonSource::Stage1;
    in.stage1 = &*m1;
    in.node_counts = c1.node_counts;
  }
  Rng rng(a.seed);
  const auto graphs = gan::generate(a.count, in, rng, {a.sample, a.shared_z});
  io::save_generated(a.output, graphs);
  std::size_t valid = 0;
  for (const auto& g : graphs) valid += metrics::valid_certificate(g).has_value();
  std::cout << "generated: " << graphs.size() << "\nvalid: " << valid << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct EvalArgs {
  std::string generated, certs, output;
};

int run_eval(const EvalArgs& a) {
  const auto report = metrics::evaluate_certificates(io::load_generated(a.generated), io::load_certificates(a.certs));
  std::cout << report.table() << report.key_values();
  if (!a.output.empty()) {
    std::ofstream out(a.output);
    if (!out) throw Error(ErrorCode::IoError, "cannot open '" + a.output + "' for writing");
    out << report.key_values();
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct VerifyArgs {
  std::string suite = "equivariance", checkpoint, model = "all";
  int n = 3;
  std::size_t samples = 100000;
  int trials = 100;
  std::uint64_t seed = 1;
  double tolerance = 1e-9;
  double alpha = 0.01;
};

std::vector<gan::StageModel> verify_models(const VerifyArgs& a, int& vocab_size, Rng& rng) {
  std::vector<gan::StageModel> models;
  if (!a.checkpoint.empty()) {
    const auto ck = gan::load_checkpoint(a.checkpoint);
    vocab_size = static_cast<int>(ck.vocab.size());
    models.push_back(to_model(ck));
    return models;
  }
  vocab_size = 21;
  for (int s = 1; s <= 3; ++s) {
    const auto stage = static_cast<gan::StageId>(s);
    if (a.model != "all" && gan::parse_stage(a.model) != stage) continue;
    gan::StageConfig c;
    c.stage = stage;
    models.push_back({c, gan::init_model(c, vocab_size, rng)});
  }
  return models;
}

int run_verify(const VerifyArgs& a) {
  Rng rng(a.seed);
  int vocab_size = 0;
  const auto models = verify_models(a, vocab_size, rng);
  bool ok = true;
  if (a.suite == "equivariance") {
    for (const auto& m : models) {
      const std::string name = "stage" + std::to_string(static_cast<int>(m.params.stage));
      const auto g = verify::check_equivariance(verify::generator_map(m, vocab_size),
                                                verify::random_generator_input(m, a.n, vocab_size, rng), a.trials, rng);
      const auto d = verify::check_equivariance(verify::discriminator_map(m),
                                                verify::random_discriminator_input(m, a.n, vocab_size, rng), a.trials, rng);
      std::cout << name << "_generator_max_deviation: " << g.max_deviation << '\n'
                << name << "_discriminator_max_deviation: " << d.max_deviation << '\n';
      ok = ok && g.max_deviation <= a.tolerance && d.max_deviation <= a.tolerance;
    }
  } else if (a.suite == "decomposition") {
    for (const auto& m : models) {
      if (m.params.stage != gan::StageId::Skeleton || m.config.layers < 2) continue;
      auto p = gnn::DeepSetsParams::bind(gnn::Binding(m.params.generator, nullptr), "set0");
      p.form = m.config.pair_form;
      p.combine_activation = true;
      // Row i of the layer evaluated on (z_i, Z_{-i}) laid out as a set with z_i first.
      verify::RowFunction row = [p](const RowVector& zi, const Matrix& others) {
        Matrix Z(others.rows() + 1, zi.cols());
        Z.row(0) = zi;
        Z.bottomRows(others.rows()) = others;
        return RowVector(gnn::deepsets_pair_layer(ad::Tensor(Z), p).value().row(0));
      };
      const Matrix Z = gan::sample_latent(std::max(a.n, 1), m.config.latent_width, rng);
      const double dev = verify::check_decomposition_invariance(row, Z, a.trials, rng);
      std::cout << "decomposition_max_deviation: " << dev << '\n';
      ok = ok && dev <= a.tolerance;
    }
  } else if (a.suite == "equiprobability") {
    for (const auto& m : models) {
      if (m.params.stage != gan::StageId::Skeleton) continue;
      const auto report = verify::equiprobability_test(verify::skeleton_generator(m), a.n, a.samples, rng);
      std::cout << report.text();
      ok = ok && report.passes(a.alpha);
    }
  } else {
    throw Error(ErrorCode::BadConfig, "unknown suite '" + a.suite + "'");
  }
  std::cout << "result: " << (ok ? "pass" : "fail") << '\n';
  return ok ? kExitOk : kExitFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Three-stage permutation-equivariant molecular graph GAN"};
  app.require_subcommand(1);
  std::uint64_t global_seed = 1;
  bool seed_given = false;

  PreprocessArgs pre;
  auto* p = app.add_subcommand("preprocess", "Parse SMILES into a dataset, vocabulary and certificate set");
  p->add_option("--input", pre.input, "SMILES file, one molecule per line")->required();
  p->add_option("--output", pre.output, "Dataset path; .vocab and .certs are written beside it")->required();
  p->add_option("--max-atoms", pre.max_atoms, "Largest heavy-atom count kept");
  p->add_option("--limit", pre.limit, "Keep only the first N molecules (0 keeps all)");
  p->add_option("--seed", global_seed, "Accepted for uniformity; preprocessing is deterministic");

  TrainArgs tr;
  auto* t = app.add_subcommand("train", "Train one stage");
  t->add_option("--stage", tr.stage, "1|2|3 or skeleton|node|edge")->required();
  t->add_option("--dataset", tr.dataset, "Dataset from preprocess")->required();
  t->add_option("--config", tr.config, "key = value config file");
  t->add_option("--set", tr.overrides, "Extra key=value settings applied after the config file");
  t->add_option("--checkpoint", tr.checkpoint, "Checkpoint output path")->required();
  t->add_option("--log", tr.log, "Loss log path (default <checkpoint>.log)");
  auto* train_seed = t->add_option("--seed", global_seed, "Overrides the config seed");

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Sample molecules from trained stages");
  g->add_option("--stage1", gen.stage1, "Stage-1 checkpoint (skeletons from stage 1)");
  g->add_option("--stage2", gen.stage2, "Stage-2 checkpoint")->required();
  g->add_option("--stage3", gen.stage3, "Stage-3 checkpoint")->required();
  g->add_option("--skeletons", gen.skeletons, "data|stage1")->check(CLI::IsMember({"data", "stage1"}));
  g->add_option("--dataset", gen.dataset, "Dataset to draw skeletons from");
  g->add_option("--count", gen.count, "Number of molecules");
  g->add_option("--output", gen.output, "Output SMILES file; invalid molecules are prefixed with !")->required();
  g->add_flag("--sample", gen.sample, "Categorical sampling instead of argmax");
  g->add_flag("--shared-z", gen.shared_z, "Reuse the stage-2 latent set in stage 3");
  g->add_option("--seed", gen.seed, "Random seed");

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "Validity, uniqueness, novelty of a generated file");
  e->add_option("--generated", ev.generated, "Generated SMILES file")->required();
  e->add_option("--certs", ev.certs, "Training certificate file")->required();
  e->add_option("--output", ev.output, "Also write key=value metrics here");
  e->add_option("--seed", global_seed, "Accepted for uniformity; evaluation is deterministic");

  VerifyArgs ve;
  auto* v = app.add_subcommand("verify", "Equivariance, decomposition and equiprobability checks");
  v->add_option("--suite", ve.suite, "equivariance|decomposition|equiprobability")
      ->check(CLI::IsMember({"equivariance", "decomposition", "equiprobability"}));
  v->add_option("--checkpoint", ve.checkpoint, "Check a trained stage instead of random weights");
  v->add_option("--model", ve.model, "Built-in random model: all|1|2|3");
  v->add_option("--n", ve.n, "Node count");
  v->add_option("--samples", ve.samples, "Samples for the equiprobability test");
  v->add_option("--trials", ve.trials, "Random permutations or orderings per check");
  v->add_option("--tolerance", ve.tolerance, "Largest accepted deviation");
  v->add_option("--alpha", ve.alpha, "Significance level");
  v->add_option("--seed", ve.seed, "Random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    return app.exit(err) == 0 ? kExitOk : kExitAbort;
  }
  seed_given = train_seed->count() > 0;

  try {
    if (*p) return run_preprocess(pre);
    if (*t) {
      if (seed_given) tr.seed = global_seed;
      return run_train(tr);
    }
    if (*g) return run_generate(gen);
    if (*e) return run_eval(ev);
    if (*v) return run_verify(ve);
  } catch (const Error& err) {
    std::cerr << "error: " << err.what() << '\n';
    switch (err.code()) {
      case ErrorCode::TooFewSamples: return kExitFailed;
      default: return kExitAbort;
    }
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitAbort;
  }
  return kExitAbort;
}
