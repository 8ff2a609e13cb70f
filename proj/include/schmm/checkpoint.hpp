#pragma once

#include <string>

#include "schmm/model.hpp"
#include "schmm/svi.hpp"
#include "schmm/trainer.hpp"

namespace schmm {

// Resumable training snapshot. The file layout is an 8-byte magic and a u32
// version, a JSON header (configs, iteration, RNG state, payload shapes), and
// raw little-endian double payloads: trans+emit for SCVI (plus the boundary
// store under the stored guard policy), the two Dirichlet matrices for SVI.
// No wall-clock or host data is recorded, so identical runs produce
// bit-identical files.
struct Checkpoint {
  std::string algo;  // "scvi" | "svi"
  ModelConfig model;
  TrainConfig train;
  int svi_buffer = 20;
  int64_t iteration = 0;
  std::string rng_state;  // mt19937_64 stream format

  GlobalStats stats;          // scvi payload
  BoundaryBeliefStore store;  // scvi payload, stored policy only
  SviState svi;               // svi payload

  static Checkpoint from_scvi(const ModelConfig&, const TrainConfig&,
                              const TrainerState&);
  static Checkpoint from_svi(const ModelConfig&, const TrainConfig&, int b,
                             const SviTrainerState&);
  TrainerState to_scvi_state() const;
  SviTrainerState to_svi_state() const;
};

// Atomic (temp + rename). Throws ErrorKind::data on I/O failure.
void save_checkpoint(const Checkpoint& ck, const std::string& path);

// Throws ErrorKind::artifact on bad magic/version/truncation.
Checkpoint load_checkpoint(const std::string& path);

}  // namespace schmm
