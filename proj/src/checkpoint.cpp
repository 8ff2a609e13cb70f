#include "schmm/checkpoint.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "schmm/config_json.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

namespace schmm {

namespace {

constexpr char kMagic[8] = {'S', 'C', 'H', 'M', 'M', 'C', 'K', '1'};
constexpr uint32_t kVersion = 1;

void write_doubles(std::ostream& out, const double* p, size_t n) {
  out.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(n * 8));
}

void read_doubles(std::istream& in, double* p, size_t n, const std::string& path) {
  if (!in.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(n * 8))) {
    fail(ErrorKind::artifact, "truncated checkpoint payload: " + path);
  }
}

}  // namespace

Checkpoint Checkpoint::from_scvi(const ModelConfig& mconf, const TrainConfig& tconf,
                                 const TrainerState& state) {
  Checkpoint ck;
  ck.algo = "scvi";
  ck.model = mconf;
  ck.train = tconf;
  ck.iteration = state.iteration;
  std::ostringstream os;
  os << state.rng;
  ck.rng_state = os.str();
  ck.stats = state.stats;
  ck.store = state.store;
  return ck;
}

Checkpoint Checkpoint::from_svi(const ModelConfig& mconf, const TrainConfig& tconf,
                                int b, const SviTrainerState& state) {
  Checkpoint ck;
  ck.algo = "svi";
  ck.model = mconf;
  ck.train = tconf;
  ck.svi_buffer = b;
  ck.iteration = state.iteration;
  std::ostringstream os;
  os << state.rng;
  ck.rng_state = os.str();
  ck.svi = state.state;
  return ck;
}

TrainerState Checkpoint::to_scvi_state() const {
  if (algo != "scvi") fail(ErrorKind::invalid_argument, "checkpoint algo is not scvi");
  TrainerState state;
  state.iteration = iteration;
  state.stats = stats;
  state.store = store;
  std::istringstream is(rng_state);
  is >> state.rng;
  if (!is) fail(ErrorKind::artifact, "unparseable RNG state in checkpoint");
  return state;
}

SviTrainerState Checkpoint::to_svi_state() const {
  if (algo != "svi") fail(ErrorKind::invalid_argument, "checkpoint algo is not svi");
  SviTrainerState state;
  state.iteration = iteration;
  state.state = svi;
  std::istringstream is(rng_state);
  is >> state.rng;
  if (!is) fail(ErrorKind::artifact, "unparseable RNG state in checkpoint");
  return state;
}

void save_checkpoint(const Checkpoint& ck, const std::string& path) {
  nlohmann::json header = {
      {"algo", ck.algo},
      {"model", model_config_json(ck.model)},
      {"train", train_config_json(ck.train)},
      {"svi_buffer", ck.svi_buffer},
      {"iteration", ck.iteration},
      {"rng_state", ck.rng_state},
  };
  if (ck.algo == "scvi") {
    header["store_n"] = ck.store.N;
  } else if (ck.algo != "svi") {
    fail(ErrorKind::invalid_argument, "checkpoint algo must be scvi or svi");
  }
  const std::string hdr = header.dump();

  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::data, "cannot write checkpoint: " + tmp);
    out.write(kMagic, sizeof(kMagic));
    const uint32_t version = kVersion;
    out.write(reinterpret_cast<const char*>(&version), 4);
    const uint64_t hlen = hdr.size();
    out.write(reinterpret_cast<const char*>(&hlen), 8);
    out.write(hdr.data(), static_cast<std::streamsize>(hdr.size()));

    if (ck.algo == "scvi") {
      write_doubles(out, ck.stats.trans.data(), ck.stats.trans.size());
      write_doubles(out, ck.stats.emit.data(), ck.stats.emit.size());
      if (ck.store.N > 0) {
        write_doubles(out, ck.store.first.data(), ck.store.first.size());
        write_doubles(out, ck.store.last.data(), ck.store.last.size());
      }
    } else {
      write_doubles(out, ck.svi.trans_dirichlet.data(), ck.svi.trans_dirichlet.size());
      write_doubles(out, ck.svi.emit_dirichlet.data(), ck.svi.emit_dirichlet.size());
    }
    if (!out.flush()) fail(ErrorKind::data, "failed writing checkpoint: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    fail(ErrorKind::data, "cannot move checkpoint into place: " + path);
  }
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::data, "cannot open checkpoint: " + path);

  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) {
    fail(ErrorKind::artifact, "bad checkpoint magic: " + path);
  }
  uint32_t version = 0;
  if (!in.read(reinterpret_cast<char*>(&version), 4) || version != kVersion) {
    fail(ErrorKind::artifact, "unsupported checkpoint version in " + path);
  }
  uint64_t hlen = 0;
  if (!in.read(reinterpret_cast<char*>(&hlen), 8) || hlen > (64u << 20)) {
    fail(ErrorKind::artifact, "corrupt checkpoint header length: " + path);
  }
  std::string hdr(hlen, '\0');
  if (!in.read(hdr.data(), static_cast<std::streamsize>(hlen))) {
    fail(ErrorKind::artifact, "truncated checkpoint header: " + path);
  }

  Checkpoint ck;
  int64_t store_n = 0;
  try {
    const nlohmann::json header = nlohmann::json::parse(hdr);
    ck.algo = header.at("algo").get<std::string>();
    ck.model = model_config_from_json(header.at("model"));
    ck.train = train_config_from_json(header.at("train"));
    ck.svi_buffer = header.value("svi_buffer", 20);
    ck.iteration = header.at("iteration").get<int64_t>();
    ck.rng_state = header.at("rng_state").get<std::string>();
    store_n = header.value("store_n", int64_t{0});
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::artifact, "corrupt checkpoint header in " + path + ": " + e.what());
  }
  ck.model.validate();
  ck.train.validate();

  if (ck.algo == "scvi") {
    ck.stats = GlobalStats(ck.model.K, ck.model.W);
    read_doubles(in, ck.stats.trans.data(), ck.stats.trans.size(), path);
    read_doubles(in, ck.stats.emit.data(), ck.stats.emit.size(), path);
    if (store_n > 0) {
      ck.store.init(store_n, ck.model.K);
      read_doubles(in, ck.store.first.data(), ck.store.first.size(), path);
      read_doubles(in, ck.store.last.data(), ck.store.last.size(), path);
    }
  } else if (ck.algo == "svi") {
    ck.svi.trans_dirichlet = Mat(ck.model.K, ck.model.K);
    ck.svi.emit_dirichlet = Mat(ck.model.K, ck.model.W);
    read_doubles(in, ck.svi.trans_dirichlet.data(), ck.svi.trans_dirichlet.size(), path);
    read_doubles(in, ck.svi.emit_dirichlet.data(), ck.svi.emit_dirichlet.size(), path);
  } else {
    fail(ErrorKind::artifact, "unknown algorithm tag in checkpoint: " + ck.algo);
  }

  // trailing bytes mean the writer and reader disagree about the layout
  char extra;
  if (in.read(&extra, 1)) {
    fail(ErrorKind::artifact, "checkpoint has trailing bytes: " + path);
  }
  return ck;
}

}  // namespace schmm
