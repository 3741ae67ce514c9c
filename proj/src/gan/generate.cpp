#include "equigan/gan/generate.hpp"

namespace equigan::gan {

using namespace ad;

namespace {

Matrix square_from_column(const Matrix& column, int n) {
  Matrix A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = column(static_cast<Index>(i) * n + j, 0);
  return A;
}

void require_stage(const StageModel* model, StageId stage) {
  if (!model) throw Error(ErrorCode::UntrainedStage, "no model for stage " + to_string(stage));
  if (model->params.stage != stage || model->config.stage != stage)
    throw Error(ErrorCode::UntrainedStage, "model supplied for stage " + to_string(stage) + " belongs to stage " +
                                               to_string(model->params.stage));
}

}  // namespace

Matrix generate_skeleton(const StageModel& stage1, int n, Rng& rng, bool sample) {
  require_stage(&stage1, StageId::Skeleton);
  const BatchTopology topo(1, n);
  Tensor Z(sample_latent(n, stage1.config.latent_width, rng));
  const auto out = stage1_generator(Binding(stage1.params.generator, nullptr), stage1.config, Z, topo,
                                    Relaxation{1.0, nullptr, false});
  return threshold_edges(out.logits.value(), topo, sample ? &rng : nullptr);
}

std::vector<MolecularGraph> generate(std::size_t count, const GenerateInputs& in, Rng& rng,
                                     const GenerateOptions& options) {
  require_stage(in.stage2, StageId::NodeAttrs);
  require_stage(in.stage3, StageId::EdgeAttrs);
  if (in.source == SkeletonSource::Stage1) require_stage(in.stage1, StageId::Skeleton);
  if (!in.vocab) throw Error(ErrorCode::UntrainedStage, "no atom vocabulary");
  if (in.source == SkeletonSource::Data && in.skeletons.empty())
    throw Error(ErrorCode::EmptyInput, "no skeletons to sample from");
  if (in.source == SkeletonSource::Stage1 && in.node_counts.empty())
    throw Error(ErrorCode::EmptyInput, "no node counts to sample from");
  const StageConfig& c2 = in.stage2->config;
  const StageConfig& c3 = in.stage3->config;
  const int k = in.vocab->size();
  if (in.stage2->params.generator["head.bias"].cols() != k)
    throw Error(ErrorCode::ShapeMismatch, "stage-2 model was trained on a different vocabulary size");
  if (options.shared_z && c2.latent_width != c3.latent_width)
    throw Error(ErrorCode::BadConfig, "shared latent sets need equal latent widths");

  const Binding g2(in.stage2->params.generator, nullptr);
  const Binding g3(in.stage3->params.generator, nullptr);
  const Relaxation exact{1.0, nullptr, false};
  std::vector<MolecularGraph> out;
  out.reserve(count);
  for (std::size_t s = 0; s < count; ++s) {
    Matrix A;
    if (in.source == SkeletonSource::Data) {
      std::uniform_int_distribution<std::size_t> pick(0, in.skeletons.size() - 1);
      A = in.skeletons[pick(rng)];
    } else {
      std::uniform_int_distribution<std::size_t> pick(0, in.node_counts.size() - 1);
      const int n = in.node_counts[pick(rng)];
      A = square_from_column(generate_skeleton(*in.stage1, n, rng, options.sample), n);
    }
    const int n = static_cast<int>(A.rows());
    const BatchTopology topo(1, n);
    const Tensor A_col(gnn::adjacency_column({A}));

    const Matrix Z2 = sample_latent(n, c2.latent_width, rng);
    const auto x_out = stage2_generator(g2, c2, Tensor(Z2), A_col, topo, exact);
    const Matrix X = options.sample ? sample_one_hot(x_out.logits.value(), rng) : argmax_one_hot(x_out.logits.value());

    const Matrix Z3 = options.shared_z ? Z2 : sample_latent(n, c3.latent_width, rng);
    const auto w_out = stage3_generator(g3, c3, Tensor(Z3), Tensor(X), A_col, topo, exact);
    const Matrix W = options.sample ? sample_one_hot(w_out.logits.value(), rng, &A_col.value(), &topo)
                                    : argmax_one_hot(w_out.logits.value(), &A_col.value());
    out.emplace_back(A, X, W, in.vocab);
  }
  return out;
}

}  // namespace equigan::gan
