#include "tess/presets.hpp"

#include "tess/errors.hpp"

namespace tess {

Preset make_preset(const std::string& name, std::size_t class_count) {
  if (class_count == 0) throw ConfigError("preset needs at least one class");
  Preset p;
  p.name = name;
  if (name == "toy-dense") {
    p.layers = {LayerSpec::dense(128), LayerSpec::dense(class_count)};
    p.default_input = {64};
  } else if (name == "toy-conv") {
    p.layers = {LayerSpec::conv(8), LayerSpec::conv(8), LayerSpec::avgpool(2), LayerSpec::dense(class_count)};
    p.default_input = {1, 16, 16};
  } else if (name == "vgg9-paper") {
    p.layers = {LayerSpec::conv(64),  LayerSpec::conv(128), LayerSpec::avgpool(2), LayerSpec::conv(256),
                LayerSpec::conv(256), LayerSpec::avgpool(2), LayerSpec::conv(512), LayerSpec::conv(512),
                LayerSpec::avgpool(2), LayerSpec::conv(512), LayerSpec::conv(512), LayerSpec::avgpool(0),
                LayerSpec::dense(class_count)};
    p.default_input = {2, 48, 48};
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  return p;
}

std::vector<std::string> preset_names() { return {"toy-dense", "toy-conv", "vgg9-paper"}; }

}  // namespace tess
