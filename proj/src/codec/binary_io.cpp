#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "srs/codec.hpp"
#include "srs/error.hpp"
#include "srs/serialize.hpp"

namespace srs {

namespace {

constexpr char kArchiveMagic[4] = {'S', 'R', 'S', 'A'};
constexpr char kSamplesMagic[4] = {'S', 'R', 'S', 'X'};
constexpr std::uint16_t kSamplesVersion = 1;

// Little-endian writer/reader independent of host byte order.
class Writer {
 public:
  void bytes(const void* p, std::size_t n) { out_.append(static_cast<const char*>(p), n); }
  template <class U>
  void uint(U v) {
    for (std::size_t i = 0; i < sizeof(U); ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void f64(double v) { uint(std::bit_cast<std::uint64_t>(v)); }
  void text(const std::string& s) {
    if (s.size() > UINT32_MAX) fail(ErrorKind::format, "embedded JSON is too large");
    uint(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view in) : in_(in) {}

  std::string_view bytes(std::size_t n) {
    if (n > in_.size() - pos_) fail(ErrorKind::format, "file is truncated");
    auto s = in_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  template <class U>
  U uint() {
    const auto s = bytes(sizeof(U));
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(static_cast<unsigned char>(s[i])) << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(uint<std::uint64_t>()); }
  std::string_view text() { return bytes(uint<std::uint32_t>()); }
  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  std::string_view in_;
  std::size_t pos_ = 0;
};

void write_header(Writer& w, const char* magic, std::uint16_t version, SampleKind kind,
                  const std::vector<std::size_t>& shape, std::size_t m) {
  if (shape.empty() || shape.size() > 255) fail(ErrorKind::format, "shape must have 1..255 axes");
  w.bytes(magic, 4);
  w.uint(version);
  w.uint(static_cast<std::uint8_t>(kind));
  w.uint(static_cast<std::uint8_t>(shape.size()));
  for (std::size_t d : shape) w.uint(static_cast<std::uint64_t>(d));
  w.uint(static_cast<std::uint64_t>(m));
}

struct Header {
  SampleKind kind;
  std::vector<std::size_t> shape;
  std::size_t n;
  std::size_t m;
};

Header read_header(Reader& r, const char* magic, std::uint16_t version, const char* what) {
  if (r.bytes(4) != std::string_view(magic, 4)) fail(ErrorKind::format, std::string("not a ") + what + " file (bad magic)");
  const auto v = r.uint<std::uint16_t>();
  if (v != version) fail(ErrorKind::format, std::string("unsupported ") + what + " version " + std::to_string(v));
  const auto kind = r.uint<std::uint8_t>();
  if (kind > 1) fail(ErrorKind::format, "unknown sample kind " + std::to_string(kind));
  const auto ndim = r.uint<std::uint8_t>();
  if (ndim == 0) fail(ErrorKind::format, "shape has no axes");
  Header h{static_cast<SampleKind>(kind), {}, 1, 0};
  for (std::uint8_t a = 0; a < ndim; ++a) {
    const auto d = r.uint<std::uint64_t>();
    if (d == 0 || d > (std::uint64_t{1} << 40) || h.n > (std::uint64_t{1} << 40) / d) {
      fail(ErrorKind::format, "invalid shape");
    }
    h.shape.push_back(static_cast<std::size_t>(d));
    h.n *= static_cast<std::size_t>(d);
  }
  h.m = static_cast<std::size_t>(r.uint<std::uint64_t>());
  if (h.m == 0) fail(ErrorKind::format, "file holds no samples");
  return h;
}

}  // namespace

std::string serialize_archive(const Archive& a) {
  Writer w;
  write_header(w, kArchiveMagic, a.version, a.kind, a.shape, a.size());
  w.f64(a.e_presv);
  w.text(dump(to_json(a.model)));
  w.text(dump(to_json(a.qoi)));
  for (const auto& s : a.samples) {
    w.uint(s.j_kept);
    for (double c : s.coeffs) w.f64(c);
  }
  return w.take();
}

Archive deserialize_archive(std::string_view bytes) {
  Reader r(bytes);
  const Header h = read_header(r, kArchiveMagic, Archive::kVersion, "archive");
  Archive a;
  a.kind = h.kind;
  a.shape = h.shape;
  a.e_presv = r.f64();
  if (!(a.e_presv > 0.0 && a.e_presv <= 1.0)) fail(ErrorKind::format, "archive e_presv outside (0, 1]");
  a.model = model_from_json(parse_json(r.text()));
  a.qoi = qoi_from_json(parse_json(r.text()));
  if (a.model.dim() != h.n) fail(ErrorKind::format, "archive model dimension does not match its shape");
  // Each sample needs at least 12 bytes; reject absurd counts before allocating.
  if (h.m > r.remaining() / 12) fail(ErrorKind::format, "file is truncated");
  a.samples.resize(h.m);
  for (auto& s : a.samples) {
    s.j_kept = r.uint<std::uint32_t>();
    if (s.j_kept < 1 || s.j_kept > h.n) fail(ErrorKind::format, "invalid retained coefficient count");
    s.coeffs.resize(s.j_kept);
    for (double& c : s.coeffs) {
      c = r.f64();
      if (!std::isfinite(c)) fail(ErrorKind::format, "non-finite coefficient");
    }
  }
  if (r.remaining() != 0) fail(ErrorKind::format, "trailing bytes after the last sample");
  return a;
}

std::string serialize_samples(const SampleSet& s) {
  Writer w;
  write_header(w, kSamplesMagic, kSamplesVersion, s.kind(), s.shape(), s.size());
  for (double v : s.values()) w.f64(v);
  return w.take();
}

SampleSet deserialize_samples(std::string_view bytes) {
  Reader r(bytes);
  const Header h = read_header(r, kSamplesMagic, kSamplesVersion, "sample");
  if (r.remaining() != h.m * h.n * 8) fail(ErrorKind::format, "sample payload length does not match the header");
  std::vector<double> values(h.m * h.n);
  for (double& v : values) v = r.f64();
  try {
    return SampleSet(h.kind, h.n, std::move(values), h.shape.size() > 1 ? h.shape : std::vector<std::size_t>{});
  } catch (const Error& e) {
    fail(ErrorKind::format, e.what());
  }
}

void write_file(const std::string& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::io, "cannot open '" + path + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorKind::io, "failed writing '" + path + "'");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) fail(ErrorKind::io, "failed reading '" + path + "'");
  return ss.str();
}

}  // namespace srs
