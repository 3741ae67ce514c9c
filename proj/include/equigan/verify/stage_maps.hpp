#pragma once

#include "equigan/gan/generate.hpp"
#include "equigan/verify/equiprobability.hpp"
#include "equigan/verify/equivariance.hpp"

namespace equigan::verify {

// Stage networks as set functions on a single graph, with relaxation and
// discretization disabled.
//   stage 1 generator:     nodes Z          -> pairs [logits, probabilities]
//   stage 2 generator:     nodes Z, pairs A -> nodes [logits, probabilities]
//   stage 3 generator:     nodes [Z, X], pairs A -> pairs [logits, probabilities]
//   stage 1 discriminator: pairs A          -> invariant score
//   stage 2 discriminator: nodes X, pairs A -> invariant score
//   stage 3 discriminator: nodes X, pairs [A, W] -> invariant score
SetFunction generator_map(const gan::StageModel& model, int vocab_size);
SetFunction discriminator_map(const gan::StageModel& model);

/// Random input of the matching layout: iid normal Z, a random symmetric
/// skeleton, one-hot X and W masked by A.
SetInput random_generator_input(const gan::StageModel& model, int n, int vocab_size, Rng& rng);
SetInput random_discriminator_input(const gan::StageModel& model, int n, int vocab_size, Rng& rng);

/// Stage-1 skeletons as labeled graphs: every atom a carbon, every edge a
/// single bond, edges where the logit is positive.
LatentGraphGenerator skeleton_generator(const gan::StageModel& stage1);

}  // namespace equigan::verify
