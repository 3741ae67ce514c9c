#pragma once

#include <string>
#include <vector>

#include "equigan/gan/loss.hpp"
#include "equigan/io/dataset.hpp"

namespace equigan::gan {

struct LogRecord {
  int step = 0;
  double d_loss = 0.0;
  double g_loss = 0.0;
  double wasserstein = 0.0;
};

/// `step<TAB>d_loss<TAB>g_loss<TAB>wasserstein_estimate`.
std::string format_log(const LogRecord& record);

/// Hooks into train_stage. Every callback defaults to a no-op.
class TrainObserver {
 public:
  virtual ~TrainObserver() = default;
  /// A data batch was drawn; its A (and X for stage 3) condition the generator.
  virtual void on_batch(StageId, const Batch&) {}
  /// Names of the parameters tracked on the tape for one update.
  virtual void on_tracked(StageId, const std::vector<std::string>&) {}
  virtual void on_record(const LogRecord&) {}
  virtual void on_checkpoint(int /*step*/, const ModelParams&) {}
};

struct TrainResult {
  ModelParams params;
  std::vector<LogRecord> log;
};

/// Alternating critic/generator training of `config.stage` alone. One step is
/// `critic_steps` critic updates followed by one generator update; the
/// conditioning inputs always come from the data batch.
TrainResult train_stage(const io::Dataset& dataset, const StageConfig& config, TrainObserver* observer = nullptr);

/// Same, continuing from `initial` (whose stage must match).
TrainResult train_stage(const io::Dataset& dataset, const StageConfig& config, ModelParams initial,
                        TrainObserver* observer = nullptr);

}  // namespace equigan::gan
