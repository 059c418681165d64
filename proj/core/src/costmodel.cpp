#include "tess/costmodel.hpp"

#include "tess/errors.hpp"

namespace tess {

void ArchDescriptor::validate() const {
  if (input_neurons == 0) throw ConfigError("architecture needs a non-empty input");
  if (layers.empty()) throw ConfigError("architecture needs at least one neuron layer");
  for (const LayerCost& l : layers) {
    if (l.neurons == 0 || l.inputs == 0 || l.connections == 0) {
      throw ConfigError("architecture layer '" + l.name + "' has a zero count");
    }
  }
  if (time_steps == 0) throw ConfigError("architecture needs T >= 1");
  if (class_count == 0) throw ConfigError("architecture needs C >= 1");
  if (learn_start > time_steps) throw ConfigError("learn_start exceeds T");
}

std::uint64_t ArchDescriptor::total_neurons() const {
  std::uint64_t n = input_neurons;
  for (const LayerCost& l : layers) n += l.neurons;
  return n;
}

std::uint64_t ArchDescriptor::total_connections() const {
  std::uint64_t c = 0;
  for (const LayerCost& l : layers) c += l.connections;
  return c;
}

ArchDescriptor describe_architecture(const std::vector<LayerSpec>& specs, const Shape& input_shape,
                                     std::size_t class_count, std::size_t time_steps, std::size_t learn_start) {
  const std::vector<LayerShapes> shapes = infer_shapes(specs, input_shape, class_count);
  ArchDescriptor arch;
  arch.input_neurons = shape_size(input_shape);
  arch.time_steps = time_steps;
  arch.learn_start = learn_start;
  arch.class_count = class_count;
  std::size_t conv_index = 0;
  std::size_t dense_index = 0;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (!specs[i].weighted()) continue;
    LayerCost c;
    c.neurons = shape_size(shapes[i].output);
    c.inputs = shape_size(shapes[i].input);
    if (shapes[i].conv) {
      c.name = "conv" + std::to_string(++conv_index);
      c.connections = c.neurons * shapes[i].conv->fan_in();
    } else {
      c.name = "fc" + std::to_string(++dense_index);
      c.connections = c.neurons * c.inputs;
    }
    arch.layers.push_back(std::move(c));
  }
  arch.validate();
  return arch;
}

std::string rule_name(LearningRule rule) {
  switch (rule) {
    case LearningRule::bptt: return "bptt";
    case LearningRule::s_tllr: return "s-tllr";
    case LearningRule::tess: return "tess";
  }
  return "unknown";
}

LearningRule parse_rule(const std::string& text) {
  if (text == "bptt") return LearningRule::bptt;
  if (text == "s-tllr" || text == "stllr") return LearningRule::s_tllr;
  if (text == "tess") return LearningRule::tess;
  throw ConfigError("unknown learning rule '" + text + "' (expected bptt, s-tllr or tess)");
}

CostReport mem_cost(const ArchDescriptor& arch, LearningRule rule, bool alpha_post_nonzero,
                    MemoryAccounting accounting, std::size_t bytes_per_scalar) {
  arch.validate();
  if (bytes_per_scalar == 0) throw ConfigError("bytes per scalar must be positive");
  CostReport r;
  r.rule = rule;
  r.quantity = "memory";
  r.bytes_per_scalar = bytes_per_scalar;

  if (rule == LearningRule::tess && accounting == MemoryAccounting::exact) {
    for (const LayerCost& l : arch.layers) {
      r.entries.push_back({l.name, l.inputs + (alpha_post_nonzero ? l.neurons : 0)});
    }
  } else {
    std::uint64_t factor = 2;
    if (rule == LearningRule::bptt) factor = arch.time_steps;
    if (rule == LearningRule::tess && !alpha_post_nonzero) factor = 1;
    r.entries.push_back({"input", factor * arch.input_neurons});
    for (const LayerCost& l : arch.layers) r.entries.push_back({l.name, factor * l.neurons});
  }
  for (const CostEntry& e : r.entries) r.total += e.value;
  return r;
}

CostReport mac_cost(const ArchDescriptor& arch, LearningRule rule) {
  arch.validate();
  CostReport r;
  r.rule = rule;
  r.quantity = "macs";
  const std::uint64_t window = arch.time_steps - arch.learn_start;
  for (const LayerCost& l : arch.layers) {
    std::uint64_t v = 0;
    switch (rule) {
      case LearningRule::bptt: v = arch.time_steps * l.connections; break;
      case LearningRule::s_tllr: v = window * l.connections; break;
      case LearningRule::tess: v = window * 2 * l.neurons * arch.class_count; break;
    }
    r.entries.push_back({l.name, v});
    r.total += v;
  }
  return r;
}

std::vector<ComplexityRow> complexity_table(const ArchDescriptor& arch) {
  arch.validate();
  double ln = 0;
  for (const LayerCost& l : arch.layers) ln += static_cast<double>(l.neurons);
  const double ln2 = static_cast<double>(arch.total_connections());
  const double t = static_cast<double>(arch.time_steps);
  const double lcn = static_cast<double>(arch.class_count) * ln;
  return {
      {"BPTT", "TLn", "TLn^2", false, false, true, t * ln, t * ln2},
      {"e-prop", "Ln^2", "Ln^2", true, false, false, ln2, ln2},
      {"OSTL", "Ln^2", "Ln^2", true, false, false, ln2, ln2},
      {"ETLP", "Ln^2", "LCn", true, true, false, ln2, lcn},
      {"OSTTP", "Ln^2", "LCn", true, true, false, ln2, lcn},
      {"OTTT", "Ln", "Ln^2", true, false, false, ln, ln2},
      {"S-TLLR", "Ln", "Ln^2", true, false, true, ln, ln2},
      {"TESS", "Ln", "LCn", true, true, true, ln, lcn},
  };
}

}  // namespace tess
