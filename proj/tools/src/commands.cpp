#include "tess_cli/commands.hpp"

#include <charconv>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "tess/checkpoint.hpp"
#include "tess/costmodel.hpp"
#include "tess/errors.hpp"
#include "tess/lsg.hpp"
#include "tess/presets.hpp"
#include "tess_cli/dataset_spec.hpp"

namespace tess::cli {

namespace {

constexpr std::uint64_t kShuffleSalt = 0x5DEECE66DULL;

std::string rng_text(const std::mt19937_64& rng) {
  std::ostringstream s;
  s << rng;
  return s.str();
}

const SpikeDataset& pick_split(const DatasetSplits& splits, const std::string& name) {
  if (name == "train") return splits.train;
  if (name == "val") return splits.val;
  if (name == "test") return splits.test;
  throw ConfigError("unknown split '" + name + "' (train, val, test)");
}

Network build_network(const RunConfig& config, const SpikeDataset& reference) {
  const std::size_t classes = reference.class_count;
  return Network::build(config.layer_specs(classes), reference.frame_shape, config.network_options(classes),
                        config.seed);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

class MetricsWriter {
 public:
  explicit MetricsWriter(const std::filesystem::path& path) : out_(path, std::ios::binary) {
    if (!out_) throw ConfigError("cannot write " + path.string());
    out_ << "epoch,split,loss,accuracy,lr,wall_seconds,lsg_macs,trace_scalars\n";
  }

  void row(std::size_t epoch, const char* split, const EvalResult& r, double lr, double wall, std::uint64_t macs,
           std::size_t traces) {
    out_ << epoch << ',' << split << ',' << format_real(r.loss) << ',' << format_real(r.accuracy) << ','
         << format_real(lr) << ',' << format_real(wall) << ',' << macs << ',' << traces << '\n';
    out_.flush();
  }

 private:
  std::ofstream out_;
};

}  // namespace

TrainSummary cmd_train(const RunConfig& config, std::ostream& log) {
  const TrainOptions base_options = config.train_options();
  const DatasetSplits splits = load_dataset(config.dataset, config.seed);
  if (splits.train.size() == 0) throw DataError("dataset '" + config.dataset + "' has no training samples");
  Network net = build_network(config, splits.train);
  if (config.learn_start >= splits.train.time_steps) {
    log << "warning: learn.start=" << config.learn_start << " >= T=" << splits.train.time_steps
        << ", no learning signal will be generated\n";
  }

  const std::filesystem::path dir = config.out_dir;
  std::filesystem::create_directories(dir);
  write_text(dir / "config.resolved.ini", config.serialize());
  MetricsWriter metrics(dir / "metrics.csv");

  NetworkOptimizer optimizer(net);
  PlateauScheduler scheduler(config.adam.lr, config.sched_patience, config.sched_factor);
  std::mt19937_64 rng(config.seed ^ kShuffleSalt);
  const std::size_t traces = NetworkState::zeros(net).trace_scalars();
  const bool has_val = splits.val.size() > 0;

  TrainSummary summary;
  summary.out_dir = dir;
  summary.final_train = evaluate(net, splits.train);
  summary.final_val = evaluate(net, splits.val);
  summary.best_val = summary.final_val;
  metrics.row(0, "train", summary.final_train, scheduler.lr(), 0, 0, traces);
  metrics.row(0, "val", summary.final_val, scheduler.lr(), 0, 0, 0);
  save_checkpoint(dir / "checkpoint_best.bin",
                  make_checkpoint(net, optimizer.states(), scheduler.lr(), 0, rng_text(rng)));

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto started = std::chrono::steady_clock::now();
    TrainOptions options = base_options;
    options.adam.lr = scheduler.lr();
    const EpochReport report = train_epoch(net, optimizer, splits.train, config.batch_size, rng, options);
    summary.final_train = evaluate(net, splits.train);
    summary.final_val = evaluate(net, splits.val);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    const double wall = config.wall_time ? seconds : 0.0;

    metrics.row(epoch, "train", summary.final_train, options.adam.lr, wall, report.counters.lsg_macs, traces);
    metrics.row(epoch, "val", summary.final_val, options.adam.lr, wall, 0, 0);
    log << "epoch " << epoch << "  train_acc " << std::fixed << std::setprecision(4) << summary.final_train.accuracy
        << "  val_acc " << summary.final_val.accuracy << "  loss " << summary.final_train.loss << "  lr "
        << std::defaultfloat << options.adam.lr << "  " << std::setprecision(3) << seconds << "s\n"
        << std::defaultfloat << std::setprecision(6);

    scheduler.step(has_val ? summary.final_val.accuracy : summary.final_train.accuracy);
    if (has_val && summary.final_val.accuracy > summary.best_val.accuracy) {
      summary.best_val = summary.final_val;
      save_checkpoint(dir / "checkpoint_best.bin",
                      make_checkpoint(net, optimizer.states(), scheduler.lr(), epoch, rng_text(rng)));
    }
    summary.epochs = epoch;
  }

  save_checkpoint(dir / "checkpoint_final.bin",
                  make_checkpoint(net, optimizer.states(), scheduler.lr(), config.epochs, rng_text(rng)));
  if (splits.test.size() > 0) {
    metrics.row(config.epochs, "test", evaluate(net, splits.test), scheduler.lr(), 0, 0, 0);
  }
  return summary;
}

EvalResult cmd_eval(const std::filesystem::path& checkpoint, const RunConfig& config, const std::string& split,
                    std::ostream& out) {
  const Checkpoint ckpt = load_checkpoint(checkpoint);
  const DatasetSplits splits = load_dataset(config.dataset, config.seed);
  Network net = build_network(config, splits.train);
  restore_checkpoint(ckpt, net);
  const EvalResult r = evaluate(net, pick_split(splits, split));
  out << "split=" << split << " samples=" << r.count << " loss=" << format_real(r.loss)
      << " accuracy=" << format_real(r.accuracy) << '\n';
  return r;
}

Shape parse_shape(const std::string& text) {
  Shape shape;
  std::istringstream in(text);
  std::string part;
  while (std::getline(in, part, 'x')) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc{} || ptr != part.data() + part.size() || v == 0) {
      throw ConfigError("bad shape '" + text + "' (expected e.g. 2x48x48)");
    }
    shape.push_back(v);
  }
  if (shape.empty()) throw ConfigError("empty shape");
  return shape;
}

void cmd_cost(const CostArgs& args, std::ostream& out) {
  if (args.format != "text" && args.format != "csv") throw ConfigError("--format must be text or csv");
  MemoryAccounting accounting = MemoryAccounting::formula;
  if (args.accounting == "exact") {
    accounting = MemoryAccounting::exact;
  } else if (args.accounting != "formula") {
    throw ConfigError("--accounting must be formula or exact");
  }

  std::vector<LayerSpec> specs;
  Shape input;
  if (!args.layers.empty()) {
    specs = parse_layer_list(args.layers, args.class_count);
    if (!args.input) throw ConfigError("--layers needs --input");
  } else {
    const Preset p = make_preset(args.preset, args.class_count);
    specs = p.layers;
    input = p.default_input;
  }
  if (args.input) input = parse_shape(*args.input);
  const ArchDescriptor arch =
      describe_architecture(specs, input, args.class_count, args.time_steps, args.learn_start);
  const bool post = args.alpha_post != 0;

  std::vector<LearningRule> rules;
  if (args.rule == "all") {
    rules = {LearningRule::bptt, LearningRule::s_tllr, LearningRule::tess};
  } else {
    rules = {parse_rule(args.rule)};
  }

  const bool csv = args.format == "csv";
  if (csv) out << "rule,layer,neurons,connections,macs,memory_scalars,memory_bytes\n";
  for (LearningRule rule : rules) {
    const CostReport macs = mac_cost(arch, rule);
    const CostReport mem = mem_cost(arch, rule, post, accounting, args.bytes_per_scalar);
    auto memory_of = [&](const std::string& name) -> std::uint64_t {
      for (const CostEntry& e : mem.entries) {
        if (e.name == name) return e.value;
      }
      return 0;
    };
    const std::string name = rule_name(rule);
    if (csv) {
      if (accounting == MemoryAccounting::formula) {
        const std::uint64_t m = memory_of("input");
        out << name << ",input," << arch.input_neurons << ",0,0," << m << ',' << m * args.bytes_per_scalar << '\n';
      }
      for (std::size_t i = 0; i < arch.layers.size(); ++i) {
        const LayerCost& l = arch.layers[i];
        const std::uint64_t m = memory_of(l.name);
        out << name << ',' << l.name << ',' << l.neurons << ',' << l.connections << ',' << macs.entries[i].value
            << ',' << m << ',' << m * args.bytes_per_scalar << '\n';
      }
      out << name << ",total," << arch.total_neurons() << ',' << arch.total_connections() << ',' << macs.total
          << ',' << mem.total << ',' << mem.bytes() << '\n';
      continue;
    }
    out << name << "  (T=" << arch.time_steps << ", t_l=" << arch.learn_start << ", C=" << arch.class_count
        << ", alpha_post " << (post ? "nonzero" : "zero") << ", " << args.accounting << " memory)\n";
    out << "  " << std::left << std::setw(8) << "layer" << std::right << std::setw(12) << "neurons" << std::setw(16)
        << "connections" << std::setw(18) << "macs" << std::setw(14) << "memory" << '\n';
    if (accounting == MemoryAccounting::formula) {
      out << "  " << std::left << std::setw(8) << "input" << std::right << std::setw(12) << arch.input_neurons
          << std::setw(16) << "-" << std::setw(18) << "-" << std::setw(14) << memory_of("input") << '\n';
    }
    for (std::size_t i = 0; i < arch.layers.size(); ++i) {
      const LayerCost& l = arch.layers[i];
      out << "  " << std::left << std::setw(8) << l.name << std::right << std::setw(12) << l.neurons
          << std::setw(16) << l.connections << std::setw(18) << macs.entries[i].value << std::setw(14)
          << memory_of(l.name) << '\n';
    }
    out << "  total macs " << macs.total << " (" << std::fixed << std::setprecision(2)
        << static_cast<double>(macs.total) / 1e6 << " x 1e6)\n";
    out << "  total memory " << mem.total << " scalars, " << mem.bytes() << " bytes, " << mem.mebibytes()
        << " MiB at " << args.bytes_per_scalar << " bytes/scalar\n";
    if (rule == LearningRule::tess && accounting == MemoryAccounting::formula) {
      const CostReport one = mem_cost(arch, rule, false, accounting, args.bytes_per_scalar);
      const CostReport two = mem_cost(arch, rule, true, accounting, args.bytes_per_scalar);
      out << "  memory factor 1 (alpha_post = 0): " << one.mebibytes() << " MiB; factor 2: " << two.mebibytes()
          << " MiB\n";
    }
    out << std::defaultfloat << std::setprecision(6);
  }

  if (args.table) {
    const std::vector<ComplexityRow> rows = complexity_table(arch);
    if (csv) {
      out << "method,memory_class,time_class,temporal_local,spatial_local,memory_value,time_value\n";
      for (const ComplexityRow& r : rows) {
        out << r.method << ',' << r.memory_class << ',' << r.time_class << ',' << r.temporal_local << ','
            << r.spatial_local << ',' << format_real(r.memory_value) << ',' << format_real(r.time_value) << '\n';
      }
    } else {
      out << "\ncomplexity  (L*n = " << format_real(rows.back().memory_value) << ")\n";
      for (const ComplexityRow& r : rows) {
        out << "  " << std::left << std::setw(8) << r.method << std::setw(6) << r.memory_class << std::setw(7)
            << r.time_class << std::setw(10) << (r.temporal_local ? "temporal" : "-") << std::setw(9)
            << (r.spatial_local ? "spatial" : "-") << std::right << std::setw(16) << std::setprecision(6)
            << r.memory_value << std::setw(16) << r.time_value << '\n';
      }
    }
  }
}

void dump_basis(const std::string& spec, std::ostream& out) {
  std::size_t classes = 0;
  std::size_t width = 0;
  std::string kind = "square-wave";
  std::istringstream in(spec);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError("--basis expects C=..,n=.., got '" + spec + "'");
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    if (key == "kind") {
      kind = value;
      continue;
    }
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || ptr != value.data() + value.size()) throw ConfigError("bad number in --basis: " + item);
    if (key == "C") {
      classes = v;
    } else if (key == "n") {
      width = v;
    } else {
      throw ConfigError("unknown --basis field '" + key + "'");
    }
  }
  const BasisMatrix b = BasisMatrix::build(
      classes, width, kind == "identity" ? BasisKind::identity : BasisKind::square_wave);
  for (std::size_t r = 0; r < b.class_count(); ++r) {
    for (std::size_t c = 0; c < b.layer_width(); ++c) {
      out << (c ? " " : "") << (b.entry(r, c) > 0 ? "+1" : "-1");
    }
    out << '\n';
  }
}

void dump_checkpoint(const std::filesystem::path& path, std::ostream& out) {
  const Checkpoint ckpt = load_checkpoint(path);
  out << "epoch " << ckpt.epoch << "\nlearning_rate " << format_real(ckpt.learning_rate) << "\nlayers "
      << ckpt.weights.size() << '\n';
  for (std::size_t i = 0; i < ckpt.weights.size(); ++i) {
    const Tensor& w = ckpt.weights[i];
    out << "layer " << i << " shape " << shape_string(w.shape()) << " l2 " << format_real(l2_norm(w)) << " max_abs "
        << format_real(max_abs(w)) << " adam_step " << ckpt.moments[i].step << '\n';
  }
  out << "rng_state_bytes " << ckpt.rng_state.size() << '\n';
}

void dump_traces(const RunConfig& config, const std::optional<std::filesystem::path>& checkpoint,
                 const std::string& split, std::size_t sample, std::ostream& out) {
  const DatasetSplits splits = load_dataset(config.dataset, config.seed);
  const SpikeDataset& data = pick_split(splits, split);
  if (sample >= data.size()) {
    throw ConfigError("sample " + std::to_string(sample) + " out of range for split " + split);
  }
  Network net = build_network(config, splits.train);
  if (checkpoint) restore_checkpoint(load_checkpoint(*checkpoint), net);

  const Sample& s = data.samples[sample];
  const Tensor target = one_hot(s.label, data.class_count);
  NetworkState state = NetworkState::zeros(net);
  auto emit = [&](std::size_t t, std::size_t layer, const char* name, const Tensor& x) {
    for (std::size_t i = 0; i < x.size(); ++i) out << t << ',' << layer << ',' << name << ',' << i << ',' << format_real(x[i]) << '\n';
  };
  out << "t,layer,tensor,index,value\n";
  for (std::size_t t = 1; t <= data.time_steps; ++t) {
    network_step(net, state, s.input.slice(t - 1), target, t);
    for (std::size_t l = 0; l < net.layers().size(); ++l) {
      if (!net.layer(l).weighted()) continue;
      const LayerStepState& ls = state.layers[l];
      emit(t, l, "u", ls.lif.u);
      emit(t, l, "o", ls.lif.o_prev);
      emit(t, l, "q", ls.trace.q);
      if (!ls.trace.h.empty()) emit(t, l, "h", ls.trace.h);
    }
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spiking network training with a local three-factor learning rule"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> dataset;
  std::optional<std::string> preset;
  std::optional<std::size_t> epochs;
  std::optional<std::string> out_dir;
  std::optional<std::size_t> threads;
  auto add_run_options = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "key = value config file");
    sub->add_option("--set", overrides, "override, key=value (repeatable)");
    sub->add_option("--seed", seed, "random seed (overrides TESS_SEED)");
    sub->add_option("--dataset", dataset, "synth:CxNxT[:noise[:samples]], synth2d:CxHxWxT[...], evf:path");
    sub->add_option("--preset", preset, "toy-dense, toy-conv or vgg9-paper");
    sub->add_option("--epochs", epochs, "training epochs");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--threads", threads, "batch-parallel workers");
  };

  CLI::App* train = app.add_subcommand("train", "train a network");
  add_run_options(train);

  CLI::App* eval = app.add_subcommand("eval", "evaluate a checkpoint");
  add_run_options(eval);
  std::string eval_checkpoint;
  std::string eval_split = "val";
  eval->add_option("--checkpoint", eval_checkpoint, "checkpoint file")->required();
  eval->add_option("--split", eval_split, "train, val or test");

  CLI::App* cost = app.add_subcommand("cost", "analytical MAC and memory report");
  CostArgs cost_args;
  cost->add_option("--preset", cost_args.preset, "architecture preset");
  cost->add_option("--layers", cost_args.layers, "explicit layer list instead of a preset");
  cost->add_option("--input", cost_args.input, "input shape, e.g. 2x48x48");
  cost->add_option("--T", cost_args.time_steps, "time steps");
  cost->add_option("--C", cost_args.class_count, "classes");
  cost->add_option("--tl", cost_args.learn_start, "learning-signal start step");
  cost->add_option("--rule", cost_args.rule, "bptt, s-tllr, tess or all");
  cost->add_option("--alpha-post", cost_args.alpha_post, "post-trace weight; 0 halves TESS memory");
  cost->add_option("--format", cost_args.format, "text or csv");
  cost->add_option("--bytes", cost_args.bytes_per_scalar, "bytes per stored scalar");
  cost->add_option("--accounting", cost_args.accounting, "formula or exact");
  cost->add_flag("--table", cost_args.table, "append the complexity table");

  CLI::App* dump = app.add_subcommand("dump", "debug dumps");
  add_run_options(dump);
  std::string dump_basis_spec;
  std::string dump_checkpoint_path;
  bool dump_trace_rows = false;
  std::string dump_split = "train";
  std::size_t dump_sample = 0;
  dump->add_option("--basis", dump_basis_spec, "C=2,n=8[,kind=identity]");
  dump->add_option("--checkpoint", dump_checkpoint_path, "checkpoint to summarize (or to load for --traces)");
  dump->add_flag("--traces", dump_trace_rows, "CSV of u, o, q, h for one sample");
  dump->add_option("--split", dump_split, "split for --traces");
  dump->add_option("--sample", dump_sample, "sample index for --traces");

  auto resolve = [&](const std::optional<std::filesystem::path>& fallback) {
    RunConfig config;
    if (!config_path.empty()) {
      config = load_config(config_path);
    } else if (fallback && std::filesystem::exists(*fallback)) {
      config = load_config(*fallback);
    }
    if (const char* env = std::getenv("TESS_SEED"); env != nullptr && *env != '\0') {
      try {
        config.set("seed", env);
      } catch (const ConfigError& e) {
        throw ConfigError(std::string("TESS_SEED: ") + e.what());
      }
    }
    if (preset) config.preset = *preset;
    if (dataset) config.dataset = *dataset;
    if (epochs) config.epochs = *epochs;
    if (out_dir) config.out_dir = *out_dir;
    if (threads) config.threads = *threads;
    if (seed) config.seed = *seed;
    for (const std::string& o : overrides) apply_override(config, o);
    return config;
  };

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);

    if (*train) {
      cmd_train(resolve(std::nullopt), err);
    } else if (*eval) {
      const std::filesystem::path ckpt = eval_checkpoint;
      if (config_path.empty() && !std::filesystem::exists(ckpt.parent_path() / "config.resolved.ini")) {
        throw ConfigError("eval needs --config or a config.resolved.ini next to the checkpoint");
      }
      cmd_eval(ckpt, resolve(ckpt.parent_path() / "config.resolved.ini"), eval_split, out);
    } else if (*cost) {
      cmd_cost(cost_args, out);
    } else if (*dump) {
      if (!dump_basis_spec.empty()) {
        dump_basis(dump_basis_spec, out);
      } else if (dump_trace_rows) {
        std::optional<std::filesystem::path> ckpt;
        if (!dump_checkpoint_path.empty()) ckpt = dump_checkpoint_path;
        dump_traces(resolve(ckpt ? std::optional(ckpt->parent_path() / "config.resolved.ini") : std::nullopt), ckpt,
                    dump_split, dump_sample, out);
      } else if (!dump_checkpoint_path.empty()) {
        dump_checkpoint(dump_checkpoint_path, out);
      } else {
        throw ConfigError("dump needs --basis, --checkpoint or --traces");
      }
    }
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ShapeError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const FormatError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const NumericError& e) {
    err << "numeric divergence: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace tess::cli
