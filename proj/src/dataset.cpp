#include "pfsim/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <boost/crc.hpp>
#include <cmath>
#include <cstring>
#include <exception>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "pfsim/evolution.hpp"
#include "pfsim/serialize.hpp"

namespace pfsim {

namespace {

constexpr char kMagic[8] = {'P', 'F', 'S', 'I', 'M', 'D', 'S', '\0'};
constexpr std::uint32_t kEndianMarker = 0x01020304u;
constexpr std::size_t kPreambleSize = 8 + 2 + 2 + 4 + 8;

using crc64_xz = boost::crc_optimal<64, 0x42F0E1EBA9EA3693ULL, ~0ULL, ~0ULL, true, true>;

class ByteWriter {
 public:
  explicit ByteWriter(std::vector<std::uint8_t>& out) : out_(out) {}

  template <class U>
  void uint(U v) {
    for (std::size_t b = 0; b < sizeof(U); ++b) out_.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
  }
  void f64(double v) { uint(std::bit_cast<std::uint64_t>(v)); }
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }

 private:
  std::vector<std::uint8_t>& out_;
};

class ByteReader {
 public:
  ByteReader(const std::uint8_t* data, std::size_t size) : data_(data), size_(size) {}

  template <class U>
  U uint() {
    need(sizeof(U));
    U v = 0;
    for (std::size_t b = 0; b < sizeof(U); ++b) v |= static_cast<U>(static_cast<U>(data_[pos_ + b]) << (8 * b));
    pos_ += sizeof(U);
    return v;
  }
  double f64() { return std::bit_cast<double>(uint<std::uint64_t>()); }
  std::string str(std::size_t n) {
    need(n);
    std::string s(reinterpret_cast<const char*>(data_ + pos_), n);
    pos_ += n;
    return s;
  }
  std::size_t pos() const { return pos_; }
  bool done() const { return pos_ == size_; }

 private:
  void need(std::size_t n) const {
    if (n > size_ - pos_) throw DatasetError("malformed dataset header: field runs past the header block");
  }
  const std::uint8_t* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
};

}  // namespace

SweepSpec SweepSpec::reference() {
  return {{0.20, 0.21, 0.22, 0.23, 0.24}, {494, 1111, 1482, 4446, 7410}, true};
}

std::vector<std::pair<double, std::uint64_t>> SweepSpec::combinations() const {
  std::vector<std::pair<double, std::uint64_t>> out;
  if (cross) {
    for (double c0 : supersaturations)
      for (auto s : seeds) out.emplace_back(c0, s);
  } else {
    if (supersaturations.size() != seeds.size()) {
      throw std::invalid_argument("SweepSpec: zipped sweep needs equally long c0 and seed lists");
    }
    for (std::size_t i = 0; i < seeds.size(); ++i) out.emplace_back(supersaturations[i], seeds[i]);
  }
  if (out.empty()) throw std::invalid_argument("SweepSpec: no combinations");
  std::sort(out.begin(), out.end());
  return out;
}

void Dataset::validate() const {
  if (!grid) throw DatasetError("dataset has no grid");
  if (meta.size() != instances.size()) throw DatasetError("dataset metadata/instance count mismatch");
  for (std::size_t n = 0; n < instances.size(); ++n) {
    const auto& tr = instances[n];
    if (tr.frames.size() != frames) {
      throw DatasetError("instance " + std::to_string(n) + " has " + std::to_string(tr.frames.size()) +
                         " frames, expected " + std::to_string(frames));
    }
    if (tr.dt != dt) throw DatasetError("instance " + std::to_string(n) + " has a different frame spacing");
    for (const auto& fr : tr.frames) {
      for (const Field2D* f : {&fr.c, &fr.eta1, &fr.eta2}) {
        if (!f->grid_ptr() || !f->grid().same_shape(*grid)) {
          throw DatasetError("instance " + std::to_string(n) + " has a frame on a different grid");
        }
      }
    }
  }
}

Dataset single_instance(Trajectory traj, InstanceMeta meta, std::size_t substeps, double noise_amp) {
  Dataset d;
  d.grid = traj.frames.at(0).c.grid_ptr();
  d.frames = traj.frames.size();
  d.dt = traj.dt;
  d.substeps = substeps;
  d.noise_amp = noise_amp;
  d.params = traj.params;
  d.meta.push_back(meta);
  d.instances.push_back(std::move(traj));
  return d;
}

FormatVersionError::FormatVersionError(std::uint16_t maj, std::uint16_t min)
    : DatasetError("unsupported dataset format version " + std::to_string(maj) + "." + std::to_string(min) +
                   " (this reader handles " + std::to_string(Dataset::kVersionMajor) + ".x)"),
      major(maj),
      minor(min) {}

ChecksumError::ChecksumError(long inst)
    : DatasetError(inst < 0 ? std::string("checksum mismatch in dataset header")
                            : "checksum mismatch in payload of instance " + std::to_string(inst)),
      instance(inst) {}

SweepError::SweepError(double c0_, std::uint64_t seed_, const std::string& cause)
    : std::runtime_error([&] {
        std::ostringstream os;
        os << "sweep instance (c0 = " << c0_ << ", seed = " << seed_ << ") failed: " << cause;
        return os.str();
      }()),
      c0(c0_),
      seed(seed_) {}

Dataset run_sweep(const SweepSpec& spec, const SimParams& params, GridPtr grid, const SweepOptions& opts) {
  params.validate();
  const auto combos = spec.combinations();
  Dataset d;
  d.grid = grid;
  d.frames = opts.frames;
  d.dt = params.dt * static_cast<double>(opts.substeps);
  d.substeps = opts.substeps;
  d.noise_amp = opts.noise_amp;
  d.params = params;
  d.instances.resize(combos.size());
  for (const auto& [c0, seed] : combos) d.meta.push_back({c0, seed});

  std::size_t threads = opts.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : opts.threads;
  threads = std::min(threads, combos.size());

  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::size_t first_error_index = combos.size();
  std::mutex err_mutex;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= combos.size()) return;
      const auto [c0, seed] = combos[i];
      try {
        d.instances[i] = simulate(make_initial(c0, seed, grid, opts.noise_amp), params, opts.frames, opts.substeps);
      } catch (const std::exception& e) {
        std::lock_guard lock(err_mutex);
        // Report the lowest failing index so the error does not depend on scheduling.
        if (i < first_error_index) {
          first_error_index = i;
          first_error = std::make_exception_ptr(SweepError(c0, seed, e.what()));
        }
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (first_error) std::rethrow_exception(first_error);
  return d;
}

std::pair<Dataset, Dataset> split(const Dataset& dataset, std::size_t n_train, std::uint64_t selection_seed) {
  const std::size_t n = dataset.size();
  if (n_train < 1 || n_train >= n) {
    throw std::invalid_argument("split: n_train must satisfy 1 <= n_train < " + std::to_string(n));
  }
  // Fisher-Yates with an explicit engine and bounded draw so the permutation
  // is identical across standard libraries.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 rng(selection_seed);
  for (std::size_t i = n - 1; i > 0; --i) {
    const std::uint64_t bound = i + 1;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t r;
    do r = rng();
    while (r >= limit);
    std::swap(order[i], order[r % bound]);
  }
  std::vector<std::size_t> train(order.begin(), order.begin() + static_cast<long>(n_train));
  std::vector<std::size_t> test(order.begin() + static_cast<long>(n_train), order.end());
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());

  auto subset = [&](const std::vector<std::size_t>& idx) {
    Dataset d = dataset;
    d.meta.clear();
    d.instances.clear();
    for (std::size_t i : idx) {
      d.meta.push_back(dataset.meta[i]);
      d.instances.push_back(dataset.instances[i]);
    }
    return d;
  };
  return {subset(train), subset(test)};
}

std::uint64_t crc64(const void* data, std::size_t n) {
  crc64_xz c;
  c.process_bytes(data, n);
  return c.checksum();
}

std::vector<std::uint8_t> encode_dataset(const Dataset& d) {
  d.validate();
  std::vector<std::uint8_t> body;
  ByteWriter b(body);
  b.uint<std::uint64_t>(d.grid->nx());
  b.uint<std::uint64_t>(d.grid->ny());
  b.f64(d.grid->lx());
  b.f64(d.grid->ly());
  b.uint<std::uint64_t>(d.frames);
  b.f64(d.dt);
  b.uint<std::uint64_t>(d.substeps);
  b.f64(d.noise_amp);
  b.uint<std::uint8_t>(d.spatial_form() == SpatialForm::FullBiharmonic ? 1 : 0);
  const std::string params = to_json(d.params).dump();
  b.uint<std::uint32_t>(static_cast<std::uint32_t>(params.size()));
  b.bytes(params.data(), params.size());
  b.uint<std::uint64_t>(d.size());
  for (const auto& m : d.meta) {
    b.f64(m.c0);
    b.uint<std::uint64_t>(m.seed);
  }

  std::vector<std::uint8_t> out;
  ByteWriter w(out);
  w.bytes(kMagic, sizeof kMagic);
  w.uint<std::uint16_t>(Dataset::kVersionMajor);
  w.uint<std::uint16_t>(Dataset::kVersionMinor);
  w.uint<std::uint32_t>(kEndianMarker);
  w.uint<std::uint64_t>(body.size());
  w.bytes(body.data(), body.size());
  w.uint<std::uint64_t>(crc64(out.data(), out.size()));

  const std::size_t per_channel = d.frames * d.grid->size();
  out.reserve(out.size() + d.size() * (8 * 3 * per_channel + 8));
  for (const auto& tr : d.instances) {
    const std::size_t start = out.size();
    for (int ch = 0; ch < 3; ++ch) {
      for (const auto& fr : tr.frames) {
        const Field2D& f = ch == 0 ? fr.c : fr.eta(ch);
        for (double v : f.values()) w.f64(v);
      }
    }
    w.uint<std::uint64_t>(crc64(out.data() + start, out.size() - start));
  }
  return out;
}

Dataset decode_dataset(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < kPreambleSize) throw TruncatedFileError("dataset file truncated: incomplete preamble");
  if (std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) throw DatasetError("not a pfsim dataset (bad magic)");
  ByteReader pre(bytes.data() + 8, kPreambleSize - 8);
  const auto major = pre.uint<std::uint16_t>();
  const auto minor = pre.uint<std::uint16_t>();
  if (major != Dataset::kVersionMajor) throw FormatVersionError(major, minor);
  if (pre.uint<std::uint32_t>() != kEndianMarker) throw DatasetError("dataset endianness marker mismatch");
  const auto body_len = pre.uint<std::uint64_t>();
  if (body_len > bytes.size() - kPreambleSize || bytes.size() - kPreambleSize - body_len < 8) {
    throw TruncatedFileError("dataset file truncated inside the header");
  }
  const std::size_t header_end = kPreambleSize + body_len;
  ByteReader crc_reader(bytes.data() + header_end, 8);
  if (crc_reader.uint<std::uint64_t>() != crc64(bytes.data(), header_end)) throw ChecksumError(-1);

  ByteReader b(bytes.data() + kPreambleSize, body_len);
  const auto nx = b.uint<std::uint64_t>();
  const auto ny = b.uint<std::uint64_t>();
  const double lx = b.f64();
  const double ly = b.f64();
  Dataset d;
  try {
    d.grid = Grid2D::make(nx, ny, lx, ly);
  } catch (const std::exception& e) {
    throw DatasetError(std::string("invalid grid in dataset header: ") + e.what());
  }
  d.frames = b.uint<std::uint64_t>();
  d.dt = b.f64();
  d.substeps = b.uint<std::uint64_t>();
  d.noise_amp = b.f64();
  const auto form_byte = b.uint<std::uint8_t>();
  const auto params_len = b.uint<std::uint32_t>();
  try {
    d.params = params_from_json(nlohmann::json::parse(b.str(params_len)));
  } catch (const DatasetError&) {
    throw;
  } catch (const std::exception& e) {
    throw DatasetError(std::string("invalid parameter block in dataset header: ") + e.what());
  }
  if ((form_byte == 1) != (d.params.ch_spatial_form == SpatialForm::FullBiharmonic) || form_byte > 1) {
    throw DatasetError("dataset header spatial-form tag disagrees with its parameter block");
  }
  const auto count = b.uint<std::uint64_t>();
  if (count > body_len / 16) throw DatasetError("dataset header instance count is implausible");
  for (std::uint64_t i = 0; i < count; ++i) {
    InstanceMeta m;
    m.c0 = b.f64();
    m.seed = b.uint<std::uint64_t>();
    d.meta.push_back(m);
  }

  const std::size_t per_channel = d.frames * d.grid->size();
  if (d.frames == 0 || per_channel / d.frames != d.grid->size()) throw DatasetError("dataset header shape overflow");
  const std::size_t block = 8 * 3 * per_channel + 8;
  const std::size_t available = bytes.size() - header_end - 8;
  if (count != 0 && available / count < block) throw TruncatedFileError("dataset file truncated inside the payload");
  if (available != count * block) throw DatasetError("dataset file has trailing bytes after the last instance");

  std::size_t pos = header_end + 8;
  for (std::uint64_t i = 0; i < count; ++i) {
    ByteReader tail(bytes.data() + pos + block - 8, 8);
    if (tail.uint<std::uint64_t>() != crc64(bytes.data() + pos, block - 8)) {
      throw ChecksumError(static_cast<long>(i));
    }
    pos += block;
  }

  pos = header_end + 8;
  for (std::uint64_t i = 0; i < count; ++i) {
    ByteReader r(bytes.data() + pos, block);
    Trajectory tr;
    tr.dt = d.dt;
    tr.params = d.params;
    tr.frames.resize(d.frames);
    for (std::size_t f = 0; f < d.frames; ++f) {
      tr.frames[f] = {Field2D(d.grid), Field2D(d.grid), Field2D(d.grid), static_cast<double>(f) * d.dt};
    }
    for (int ch = 0; ch < 3; ++ch) {
      for (auto& fr : tr.frames) {
        Field2D& fld = ch == 0 ? fr.c : (ch == 1 ? fr.eta1 : fr.eta2);
        for (auto& v : fld.storage()) v = r.f64();
      }
    }
    d.instances.push_back(std::move(tr));
    pos += block;
  }
  return d;
}

void write_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  const auto bytes = encode_dataset(dataset);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

Dataset read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_dataset(bytes);
}

namespace {

void write_npy(const std::filesystem::path& path, std::size_t t, std::size_t nx, std::size_t ny,
               const std::vector<double>& data) {
  std::string header = "{'descr': '<f8', 'fortran_order': False, 'shape': (" + std::to_string(t) + ", " +
                       std::to_string(nx) + ", " + std::to_string(ny) + "), }";
  const std::size_t unpadded = 10 + header.size() + 1;
  header.append((64 - unpadded % 64) % 64, ' ');
  header.push_back('\n');
  std::vector<std::uint8_t> out;
  ByteWriter w(out);
  w.bytes("\x93NUMPY", 6);
  w.uint<std::uint8_t>(1);
  w.uint<std::uint8_t>(0);
  w.uint<std::uint16_t>(static_cast<std::uint16_t>(header.size()));
  w.bytes(header.data(), header.size());
  for (double v : data) w.f64(v);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
  f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
}

std::vector<double> read_npy(const std::filesystem::path& path, const std::vector<std::size_t>& expect_shape) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < 10 || std::memcmp(bytes.data(), "\x93NUMPY", 6) != 0) {
    throw DatasetError("'" + path.string() + "' is not an .npy file");
  }
  const int major = bytes[6];
  std::size_t hlen = 0, off = 0;
  if (major == 1) {
    hlen = bytes[8] | (static_cast<std::size_t>(bytes[9]) << 8);
    off = 10;
  } else if (major == 2 || major == 3) {
    if (bytes.size() < 12) throw TruncatedFileError("'" + path.string() + "' truncated");
    hlen = bytes[8] | (static_cast<std::size_t>(bytes[9]) << 8) | (static_cast<std::size_t>(bytes[10]) << 16) |
           (static_cast<std::size_t>(bytes[11]) << 24);
    off = 12;
  } else {
    throw DatasetError("'" + path.string() + "': unsupported .npy version");
  }
  if (bytes.size() < off + hlen) throw TruncatedFileError("'" + path.string() + "' truncated in header");
  const std::string header(reinterpret_cast<const char*>(bytes.data() + off), hlen);
  auto remove_ws = [](std::string s) {
    s.erase(std::remove_if(s.begin(), s.end(), [](char c) { return c == ' ' || c == '\n'; }), s.end());
    return s;
  };
  const std::string h = remove_ws(header);
  if (h.find("'descr':'<f8'") == std::string::npos) throw DatasetError("'" + path.string() + "': dtype must be <f8");
  if (h.find("'fortran_order':False") == std::string::npos) {
    throw DatasetError("'" + path.string() + "': fortran-ordered arrays are not supported");
  }
  const auto sp = h.find("'shape':(");
  const auto se = h.find(')', sp);
  if (sp == std::string::npos || se == std::string::npos) throw DatasetError("'" + path.string() + "': no shape");
  std::vector<std::size_t> shape;
  std::stringstream ss(h.substr(sp + 9, se - sp - 9));
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) shape.push_back(std::stoull(tok));
  }
  if (shape != expect_shape) throw DatasetError("'" + path.string() + "': shape does not match the manifest");
  std::size_t n = 1;
  for (auto s : shape) n *= s;
  if (bytes.size() != off + hlen + 8 * n) throw TruncatedFileError("'" + path.string() + "': payload size mismatch");
  std::vector<double> data(n);
  ByteReader r(bytes.data() + off + hlen, 8 * n);
  for (auto& v : data) v = r.f64();
  return data;
}

const char* kChannelNames[3] = {"c", "eta1", "eta2"};

}  // namespace

void export_npy(const Dataset& d, const std::filesystem::path& dir) {
  d.validate();
  std::filesystem::create_directories(dir);
  nlohmann::json manifest;
  manifest["format"] = "pfsim-npy";
  manifest["version"] = 1;
  manifest["grid"] = {{"nx", d.grid->nx()}, {"ny", d.grid->ny()}, {"lx", d.grid->lx()}, {"ly", d.grid->ly()}};
  manifest["frames"] = d.frames;
  manifest["dt"] = d.dt;
  manifest["substeps"] = d.substeps;
  manifest["noise_amp"] = d.noise_amp;
  manifest["params"] = to_json(d.params);
  manifest["layout"] = "(T, nx, ny), float64 little-endian, C order";
  manifest["instances"] = nlohmann::json::array();
  for (std::size_t i = 0; i < d.size(); ++i) {
    nlohmann::json entry{{"c0", d.meta[i].c0}, {"seed", d.meta[i].seed}};
    for (int ch = 0; ch < 3; ++ch) {
      char name[64];
      std::snprintf(name, sizeof name, "inst%03zu_%s.npy", i, kChannelNames[ch]);
      std::vector<double> data;
      data.reserve(d.frames * d.grid->size());
      for (const auto& fr : d.instances[i].frames) {
        const Field2D& f = ch == 0 ? fr.c : fr.eta(ch);
        data.insert(data.end(), f.values().begin(), f.values().end());
      }
      write_npy(dir / name, d.frames, d.grid->nx(), d.grid->ny(), data);
      entry[kChannelNames[ch]] = name;
    }
    manifest["instances"].push_back(entry);
  }
  std::ofstream out(dir / "manifest.json");
  if (!out) throw IoError("cannot write manifest in '" + dir.string() + "'");
  out << manifest.dump(2) << '\n';
}

Dataset import_npy(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw IoError("no manifest.json in '" + dir.string() + "'");
  nlohmann::json m;
  try {
    m = nlohmann::json::parse(in);
  } catch (const std::exception& e) {
    throw DatasetError(std::string("malformed manifest: ") + e.what());
  }
  if (m.value("format", "") != "pfsim-npy") throw DatasetError("manifest format is not pfsim-npy");
  if (m.value("version", 0) != 1) throw FormatVersionError(static_cast<std::uint16_t>(m.value("version", 0)), 0);
  Dataset d;
  try {
    const auto& g = m.at("grid");
    d.grid = Grid2D::make(g.at("nx").get<std::size_t>(), g.at("ny").get<std::size_t>(), g.at("lx").get<double>(),
                          g.at("ly").get<double>());
    d.frames = m.at("frames").get<std::size_t>();
    d.dt = m.at("dt").get<double>();
    d.substeps = m.value("substeps", std::size_t{1});
    d.noise_amp = m.value("noise_amp", 0.0);
    d.params = params_from_json(m.at("params"));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw DatasetError(std::string("malformed manifest: ") + e.what());
  }
  const std::vector<std::size_t> shape{d.frames, d.grid->nx(), d.grid->ny()};
  for (const auto& entry : m.at("instances")) {
    d.meta.push_back({entry.at("c0").get<double>(), entry.at("seed").get<std::uint64_t>()});
    Trajectory tr;
    tr.dt = d.dt;
    tr.params = d.params;
    std::array<std::vector<double>, 3> ch;
    for (int c = 0; c < 3; ++c) ch[c] = read_npy(dir / entry.at(kChannelNames[c]).get<std::string>(), shape);
    const std::size_t n = d.grid->size();
    for (std::size_t f = 0; f < d.frames; ++f) {
      auto slice = [&](int c) {
        return Field2D(d.grid, std::vector<double>(ch[c].begin() + static_cast<long>(f * n),
                                                   ch[c].begin() + static_cast<long>((f + 1) * n)));
      };
      tr.frames.push_back({slice(0), slice(1), slice(2), static_cast<double>(f) * d.dt});
    }
    d.instances.push_back(std::move(tr));
  }
  d.validate();
  return d;
}

Dataset load_any(const std::filesystem::path& path) {
  if (std::filesystem::is_directory(path)) return import_npy(path);
  return read_dataset(path);
}

}  // namespace pfsim
