#include "equigan/gan/train.hpp"

#include <cmath>
#include <cstdio>
#include <map>

#include "equigan/gan/optimizer.hpp"

namespace equigan::gan {

using namespace ad;

std::string format_log(const LogRecord& r) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%d\t%.10g\t%.10g\t%.10g", r.step, r.d_loss, r.g_loss, r.wasserstein);
  return buf;
}

namespace {

/// Draws same-size batches: a graph is picked uniformly and the batch is
/// filled with replacement from graphs of its node count.
class BatchSampler {
 public:
  BatchSampler(const io::Dataset& data, int batch_size) : data_(data), batch_size_(batch_size) {
    for (std::size_t g = 0; g < data.graphs.size(); ++g) buckets_[data.graphs[g].n()].push_back(g);
  }

  Batch draw(Rng& rng) const {
    std::uniform_int_distribution<std::size_t> any(0, data_.graphs.size() - 1);
    const auto& bucket = buckets_.at(data_.graphs[any(rng)].n());
    std::uniform_int_distribution<std::size_t> pick(0, bucket.size() - 1);
    std::vector<const MolecularGraph*> chosen;
    for (int b = 0; b < batch_size_; ++b) chosen.push_back(&data_.graphs[bucket[pick(rng)]]);
    return make_batch(chosen);
  }

 private:
  const io::Dataset& data_;
  int batch_size_;
  std::map<int, std::vector<std::size_t>> buckets_;
};

struct Tracked {
  Binding binding;
  std::vector<std::string> names;
  std::vector<Tensor> tensors;
};

Tracked track(const ParameterStore& store, Tape& tape) {
  Tracked t{Binding(store, &tape), store.names(), {}};
  for (const auto& name : t.names) t.tensors.push_back(t.binding[name]);
  return t;
}

std::map<std::string, Matrix> gradients(Tape& tape, const Tensor& loss, const Tracked& t) {
  auto grads = tape.gradient(loss, t.tensors);
  std::map<std::string, Matrix> out;
  for (std::size_t i = 0; i < grads.size(); ++i) out.emplace(t.names[i], grads[i].value());
  return out;
}

StageOutput run_generator(StageId stage, const Binding& g, const StageConfig& c, const Batch& real,
                          const BatchTopology& topo, Rng& rng, double tau) {
  const Relaxation relax{tau, c.gumbel ? &rng : nullptr, true};
  Tensor Z(sample_latent(static_cast<int>(topo.nodes()), c.latent_width, rng));
  switch (stage) {
    case StageId::Skeleton: return stage1_generator(g, c, Z, topo, relax);
    case StageId::NodeAttrs: return stage2_generator(g, c, Z, Tensor(real.A), topo, relax);
    case StageId::EdgeAttrs: return stage3_generator(g, c, Z, Tensor(real.X), Tensor(real.A), topo, relax);
  }
  throw Error(ErrorCode::BadConfig, "unknown stage");
}

void require_finite(double v, const char* what, int step) {
  if (!std::isfinite(v))
    throw Error(ErrorCode::DivergedLoss, std::string(what) + " is not finite at step " + std::to_string(step));
}

}  // namespace

TrainResult train_stage(const io::Dataset& dataset, const StageConfig& config, TrainObserver* observer) {
  if (dataset.graphs.empty()) throw Error(ErrorCode::EmptyDataset, "no training graphs");
  Rng init_rng(config.seed);
  return train_stage(dataset, config, init_model(config, dataset.vocab->size(), init_rng), observer);
}

TrainResult train_stage(const io::Dataset& dataset, const StageConfig& c, ModelParams params, TrainObserver* observer) {
  check(c);
  if (dataset.graphs.empty()) throw Error(ErrorCode::EmptyDataset, "no training graphs");
  if (params.stage != c.stage) throw Error(ErrorCode::BadConfig, "initial parameters belong to another stage");
  const StageId stage = c.stage;
  Rng rng(c.seed ^ 0x9e3779b97f4a7c15ULL);
  BatchSampler sampler(dataset, c.batch_size);
  Adam d_opt(c.learning_rate, c.beta1, c.beta2);
  Adam g_opt(c.learning_rate, c.beta1, c.beta2);
  const bool use_penalty = c.lipschitz == Lipschitz::GradientPenalty;
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  TrainResult result;
  for (int step = 1; step <= c.max_steps; ++step) {
    const double tau = temperature(c, step - 1);
    LogRecord record{step, 0.0, 0.0, 0.0};

    for (int k = 0; k < c.critic_steps; ++k) {
      const Batch real = sampler.draw(rng);
      if (observer) observer->on_batch(stage, real);
      const BatchTopology topo(real.size, real.n);
      // Generator weights enter as constants: no gradient reaches them.
      const StageOutput fake = run_generator(stage, Binding(params.generator, nullptr), c, real, topo, rng, tau);
      Tape tape;
      const Tracked d = track(params.discriminator, tape);
      if (observer) observer->on_tracked(stage, d.names);
      PenaltyInput penalty{Matrix(real.size, 1), &tape};
      for (int b = 0; b < real.size; ++b) penalty.epsilon(b, 0) = unit(rng);
      const StageLoss loss =
          wgan_stage_loss(stage, real, detach(fake.sample), d.binding, c, topo, use_penalty ? &penalty : nullptr);
      require_finite(loss.d_loss.item(), "critic loss", step);
      d_opt.step(params.discriminator, gradients(tape, loss.d_loss, d));
      if (!use_penalty) clip_weights(params.discriminator, c.clip);
      record.d_loss = loss.d_loss.item();
      record.wasserstein = loss.value.item();
    }

    const Batch real = sampler.draw(rng);
    if (observer) observer->on_batch(stage, real);
    const BatchTopology topo(real.size, real.n);
    Tape tape;
    const Tracked g = track(params.generator, tape);
    if (observer) observer->on_tracked(stage, g.names);
    const StageOutput fake = run_generator(stage, g.binding, c, real, topo, rng, tau);
    const Tensor d_fake = critic(stage, Binding(params.discriminator, nullptr), c, fake.sample, real, topo);
    const Tensor g_loss = mean(d_fake);
    require_finite(g_loss.item(), "generator loss", step);
    g_opt.step(params.generator, gradients(tape, g_loss, g));
    record.g_loss = g_loss.item();

    if (step % c.log_every == 0 || step == c.max_steps) {
      result.log.push_back(record);
      if (observer) observer->on_record(record);
    }
    if (observer && c.checkpoint_every > 0 && step % c.checkpoint_every == 0) observer->on_checkpoint(step, params);
  }
  result.params = std::move(params);
  return result;
}

}  // namespace equigan::gan
