#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "tess/data.hpp"

namespace tess::cli {

// Missing, unreadable or malformed data. Maps to exit status 3.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dataset sources:
//   synth:CxNxT[:noise[:samples]]        dense frames of N neurons
//   synth2d:CxHxWxT[:noise[:samples]]    single-channel H x W frames
//   evf:path                             EVF1 file, shuffled and split 80/10/10
// Defaults: noise 0.05, 1000 samples. Everything is seeded from `seed`.
DatasetSplits load_dataset(const std::string& spec, std::uint64_t seed);

}  // namespace tess::cli
