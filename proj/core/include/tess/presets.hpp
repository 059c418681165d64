#pragma once

#include <string>
#include <vector>

#include "tess/network.hpp"

namespace tess {

struct Preset {
  std::string name;
  std::vector<LayerSpec> layers;
  Shape default_input;  // used when no dataset fixes the frame shape
};

/// Named layer stacks:
///   toy-dense   dense(128) -> dense(C)
///   toy-conv    conv(8) -> conv(8) -> avgpool(2) -> dense(C)
///   vgg9-paper  64c3-128c3-p2-256c3-256c3-p2-512c3-512c3-p2-512c3-512c3-gap-fc(C), 2x48x48 input.
///               A reconstruction for cost modelling; not meant to be trained.
Preset make_preset(const std::string& name, std::size_t class_count);
std::vector<std::string> preset_names();

}  // namespace tess
