#include "checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "zilr/hash.hpp"

namespace zilr {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'Z', 'I', 'L', 'R', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

class Writer {
 public:
  explicit Writer(std::ofstream& out) : out_(out) {}
  template <class T>
  void put(T v) {
    out_.write(reinterpret_cast<const char*>(&v), sizeof(T));
  }
  void put_doubles(const double* p, std::size_t n) {
    out_.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
  }
  void put_string(const std::string& s) {
    put(static_cast<std::uint32_t>(s.size()));
    out_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }

 private:
  std::ofstream& out_;
};

class Reader {
 public:
  Reader(std::ifstream& in, const std::filesystem::path& path) : in_(in), path_(path) {}
  template <class T>
  T get() {
    T v{};
    in_.read(reinterpret_cast<char*>(&v), sizeof(T));
    check();
    return v;
  }
  void get_doubles(double* p, std::size_t n) {
    in_.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
    check();
  }
  std::string get_string() {
    const auto len = get<std::uint32_t>();
    std::string s(len, '\0');
    in_.read(s.data(), len);
    check();
    return s;
  }

 private:
  void check() {
    if (!in_) throw std::runtime_error("checkpoint " + path_.string() + " is truncated");
  }
  std::ifstream& in_;
  const std::filesystem::path& path_;
};

std::string rng_state(const Rng& rng) {
  std::ostringstream os;
  os << rng;
  return os.str();
}

Rng rng_from_state(const std::string& s) {
  Rng rng;
  std::istringstream is(s);
  is >> rng;
  if (!is) throw std::runtime_error("checkpoint holds a malformed RNG state");
  return rng;
}

}  // namespace

std::uint64_t config_hash(const Dataset& data, const SamplerConfig& cfg) {
  Sha256 h;
  auto put = [&](auto v) { h.update(&v, sizeof(v)); };
  auto put_matrix = [&](const Matrix& m) {
    put(static_cast<std::int64_t>(m.rows()));
    put(static_cast<std::int64_t>(m.cols()));
    h.update(m.data(), static_cast<std::size_t>(m.size()) * sizeof(double));
  };
  put(cfg.n_replicas);
  put(cfg.temp_ratio);
  put(cfg.exchange_every);
  put(cfg.total_iters);
  put(cfg.burn_in);
  put_matrix(cfg.prior_mean_beta);
  put_matrix(cfg.prior_mean_gamma);
  put_matrix(cfg.prior_cov_beta);
  put_matrix(cfg.prior_cov_gamma);
  put(cfg.prior_var);
  put(cfg.pg_trunc);
  put(cfg.seed);
  put(cfg.init_sd);
  put_matrix(data.y);
  put_matrix(data.X);
  put_matrix(data.zmat());
  const auto digest = h.finish();
  std::uint64_t out = 0;
  std::memcpy(&out, digest.data(), sizeof(out));
  return out;
}

void write_checkpoint(const std::filesystem::path& path, std::uint64_t hash, const Dataset& data,
                      const SamplerSnapshot& snap) {
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write checkpoint " + tmp.string());
    Writer w(out);
    out.write(kMagic, sizeof(kMagic));
    w.put(kVersion);
    w.put(hash);
    w.put(static_cast<std::uint64_t>(snap.completed));
    w.put(static_cast<std::uint32_t>(snap.states.size()));
    w.put(static_cast<std::uint32_t>(data.n()));
    w.put(static_cast<std::uint32_t>(data.d()));
    w.put(static_cast<std::uint32_t>(data.p()));
    for (const ReplicaState& s : snap.states) {
      w.put(s.temperature);
      w.put_doubles(s.beta.data(), static_cast<std::size_t>(s.beta.size()));
      w.put_doubles(s.gamma.data(), static_cast<std::size_t>(s.gamma.size()));
      out.write(reinterpret_cast<const char*>(s.h.data()), static_cast<std::streamsize>(s.h.size()));
      w.put_string(rng_state(s.rng));
    }
    w.put_string(rng_state(snap.swap_rng));
    for (std::size_t k = 0; k < snap.swap_attempts.size(); ++k) {
      w.put(snap.swap_attempts[k]);
      w.put(snap.swap_accepts[k]);
    }
    w.put(static_cast<std::uint64_t>(snap.draws.rows()));
    w.put(static_cast<std::uint64_t>(snap.draws.cols()));
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = snap.draws;
    w.put_doubles(rm.data(), static_cast<std::size_t>(rm.size()));
    w.put_doubles(snap.loglik.data(), static_cast<std::size_t>(snap.loglik.size()));
    if (!out) throw std::runtime_error("failed writing checkpoint " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

SamplerSnapshot read_checkpoint(const std::filesystem::path& path, std::uint64_t expected_hash,
                                const Dataset& data) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path.string());
  Reader r(in, path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error(path.string() + " is not a sampler checkpoint");
  if (const auto v = r.get<std::uint32_t>(); v != kVersion)
    throw std::runtime_error("unsupported checkpoint version " + std::to_string(v));
  if (r.get<std::uint64_t>() != expected_hash)
    throw std::runtime_error("checkpoint " + path.string() +
                             " was written for a different configuration or dataset");
  SamplerSnapshot snap;
  snap.completed = static_cast<int>(r.get<std::uint64_t>());
  const auto M = r.get<std::uint32_t>();
  const auto n = r.get<std::uint32_t>();
  const auto d = r.get<std::uint32_t>();
  const auto p = r.get<std::uint32_t>();
  if (static_cast<int>(n) != data.n() || static_cast<int>(d) != data.d() ||
      static_cast<int>(p) != data.p())
    throw std::runtime_error("checkpoint dimensions do not match the dataset");
  snap.states.resize(M);
  for (ReplicaState& s : snap.states) {
    s.temperature = r.get<double>();
    s.beta.resize(d);
    s.gamma.resize(p);
    r.get_doubles(s.beta.data(), d);
    r.get_doubles(s.gamma.data(), p);
    s.h.resize(n);
    in.read(reinterpret_cast<char*>(s.h.data()), n);
    s.rng = rng_from_state(r.get_string());
  }
  snap.swap_rng = rng_from_state(r.get_string());
  const std::size_t pairs = M > 0 ? M - 1 : 0;
  snap.swap_attempts.resize(pairs);
  snap.swap_accepts.resize(pairs);
  for (std::size_t k = 0; k < pairs; ++k) {
    snap.swap_attempts[k] = r.get<std::int64_t>();
    snap.swap_accepts[k] = r.get<std::int64_t>();
  }
  const auto rows = r.get<std::uint64_t>();
  const auto cols = r.get<std::uint64_t>();
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm(rows, cols);
  r.get_doubles(rm.data(), rows * cols);
  snap.draws = rm;
  snap.loglik.resize(static_cast<Eigen::Index>(rows));
  r.get_doubles(snap.loglik.data(), rows);
  return snap;
}

}  // namespace zilr
