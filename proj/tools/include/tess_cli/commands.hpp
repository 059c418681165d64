#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tess/trainer.hpp"
#include "tess_cli/config.hpp"

namespace tess::cli {

// Exit status contract.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitNumeric = 4;

struct TrainSummary {
  std::size_t epochs = 0;
  EvalResult final_train;
  EvalResult final_val;
  EvalResult best_val;
  std::filesystem::path out_dir;
};

/// Trains per `config`, writing into config.out_dir:
///   metrics.csv          epoch,split,loss,accuracy,lr,wall_seconds,lsg_macs,trace_scalars
///   checkpoint_final.bin
///   checkpoint_best.bin  best validation accuracy so far (epoch 0 included)
///   config.resolved.ini
/// Progress goes to `log`.
TrainSummary cmd_train(const RunConfig& config, std::ostream& log);

/// Rebuilds the network described by `config`, loads the checkpoint weights and
/// evaluates one split ("train", "val" or "test") of config.dataset.
EvalResult cmd_eval(const std::filesystem::path& checkpoint, const RunConfig& config, const std::string& split,
                    std::ostream& out);

struct CostArgs {
  std::string preset = "vgg9-paper";
  std::string layers;                  // explicit stack instead of a preset
  std::optional<std::string> input;    // "2x48x48" or "64"; preset default otherwise
  std::size_t time_steps = 10;
  std::size_t class_count = 10;
  std::size_t learn_start = 0;
  std::string rule = "all";            // bptt, s-tllr, tess or all
  double alpha_post = 1;
  std::string format = "text";         // text or csv
  std::size_t bytes_per_scalar = 4;
  std::string accounting = "formula";  // formula or exact
  bool table = false;                  // append the complexity table
};

void cmd_cost(const CostArgs& args, std::ostream& out);

/// "C=2,n=8" -> one line of +1/-1 entries per basis row.
void dump_basis(const std::string& spec, std::ostream& out);
void dump_checkpoint(const std::filesystem::path& path, std::ostream& out);

/// Runs one sample of `split` through the network (checkpoint weights when
/// given) and writes CSV rows t,layer,tensor,index,value for u, o, q and h.
void dump_traces(const RunConfig& config, const std::optional<std::filesystem::path>& checkpoint,
                 const std::string& split, std::size_t sample, std::ostream& out);

/// Parses "2x48x48" into a shape.
Shape parse_shape(const std::string& text);

/// Full command-line entry point; returns the process exit status.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tess::cli
