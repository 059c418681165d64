#pragma once

#include <cstdint>

namespace tess {

/// Instrumentation shared by the learning engine and the network driver.
struct OpCounters {
  std::uint64_t lsg_macs = 0;       // multiply-accumulates spent generating learning signals
  std::uint64_t lif_steps = 0;      // lif_step invocations
  std::uint64_t weight_updates = 0; // optimizer applications to a weight tensor

  OpCounters& operator+=(const OpCounters& other) {
    lsg_macs += other.lsg_macs;
    lif_steps += other.lif_steps;
    weight_updates += other.weight_updates;
    return *this;
  }
};

}  // namespace tess
