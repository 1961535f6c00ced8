#include "magzak/snapshot.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "magzak/error.hpp"
#include "magzak/groundstate.hpp"
#include "magzak/integrator.hpp"

namespace magzak::snapshot {

namespace {

template <class T>
void put(std::ostream& out, T v) {
  std::array<char, sizeof(T)> buf;
  std::memcpy(buf.data(), &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf.begin(), buf.end());
  out.write(buf.data(), buf.size());
}

template <class T>
T get(std::istream& in) {
  std::array<char, sizeof(T)> buf;
  if (!in.read(buf.data(), buf.size())) throw Error(Errc::IoError, "snapshot is truncated");
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf.begin(), buf.end());
  T v;
  std::memcpy(&v, buf.data(), sizeof(T));
  return v;
}

struct Header {
  std::uint32_t dim = 0;
  std::uint32_t points = 0;
  double period = 0.0;
  double time = 0.0;
  double alpha = 1.0;
  double epsilon = 0.0;
  std::string tag;
};

void write_header(std::ostream& out, const TorusGrid& g, double time, double alpha, double epsilon,
                  std::string_view tag) {
  out.write(kMagic.data(), static_cast<std::streamsize>(kMagic.size()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(g.dim()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(g.points()));
  put<double>(out, g.period());
  put<double>(out, time);
  put<double>(out, alpha);
  put<double>(out, epsilon);
  out.write(tag.data(), 2);
}

Header read_header(std::istream& in, std::string_view expected_tag) {
  std::string magic(kMagic.size(), '\0');
  if (!in.read(magic.data(), static_cast<std::streamsize>(magic.size())) || magic != kMagic)
    throw Error(Errc::SnapshotVersionMismatch, "not a version-1 snapshot (bad magic)");
  Header h;
  h.dim = get<std::uint32_t>(in);
  h.points = get<std::uint32_t>(in);
  h.period = get<double>(in);
  h.time = get<double>(in);
  h.alpha = get<double>(in);
  h.epsilon = get<double>(in);
  h.tag.assign(2, '\0');
  if (!in.read(h.tag.data(), 2)) throw Error(Errc::IoError, "snapshot is truncated");
  if (h.tag != expected_tag)
    throw Error(Errc::SnapshotVersionMismatch,
                "snapshot record is '" + h.tag + "', expected '" + std::string(expected_tag) + "'");
  return h;
}

GridPtr grid_from(const Header& h) {
  try {
    return make_grid(static_cast<int>(h.dim), static_cast<int>(h.points), h.period);
  } catch (const Error& e) {
    throw Error(Errc::SnapshotVersionMismatch, std::string("snapshot grid invalid: ") + e.what());
  }
}

void put_field(std::ostream& out, const Field& f) {
  for (const auto& z : f) {
    put<double>(out, z.real());
    put<double>(out, z.imag());
  }
}

Field get_field(std::istream& in, std::size_t size) {
  Field f(size);
  for (auto& z : f) {
    const double re = get<double>(in);
    const double im = get<double>(in);
    z = {re, im};
  }
  return f;
}

void finish_write(std::ostream& out) {
  if (!out) throw Error(Errc::IoError, "failed writing snapshot");
}

template <class Fn>
void to_file(const std::filesystem::path& path, Fn fn) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot open " + path.string() + " for writing");
  fn(out);
}

template <class Fn>
auto from_file(const std::filesystem::path& path, Fn fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  return fn(in);
}

}  // namespace

void write_state(std::ostream& out, const SystemState& st) {
  write_header(out, *st.grid, st.time, st.params.alpha, st.params.epsilon, "ST");
  for (int a = 0; a < 3; ++a) put_field(out, st.e[a]);
  put_field(out, st.n);
  put_field(out, st.n_t);
  for (int a = 0; a < 3; ++a) put_field(out, st.b[a]);
  for (int a = 0; a < 3; ++a) put_field(out, st.b_t[a]);
  finish_write(out);
}

SystemState read_state(std::istream& in, double s) {
  const Header h = read_header(in, "ST");
  GridPtr g = grid_from(h);
  SystemState st = SystemState::zeros(g, Params{h.alpha, h.epsilon, s});
  st.time = h.time;
  for (int a = 0; a < 3; ++a) st.e[a] = get_field(in, g->size());
  st.n = get_field(in, g->size());
  st.n_t = get_field(in, g->size());
  for (int a = 0; a < 3; ++a) st.b[a] = get_field(in, g->size());
  for (int a = 0; a < 3; ++a) st.b_t[a] = get_field(in, g->size());
  st.validate();
  return st;
}

void write_ground_state(std::ostream& out, const GroundState& gs) {
  write_header(out, *gs.grid, 0.0, 1.0, 0.0, "GS");
  put<double>(out, gs.tol);
  put<double>(out, gs.mass);
  put<double>(out, gs.residual);
  put_field(out, gs.q);
  finish_write(out);
}

GroundState read_ground_state(std::istream& in) {
  const Header h = read_header(in, "GS");
  GroundState gs;
  gs.grid = grid_from(h);
  gs.tol = get<double>(in);
  gs.mass = get<double>(in);
  gs.residual = get<double>(in);
  gs.q = get_field(in, gs.grid->size());
  return gs;
}

void write_low_frequency(std::ostream& out, const LowFrequencyData& lf) {
  write_header(out, *lf.grid, 0.0, 1.0, 0.0, "LF");
  put_field(out, lf.n1);
  for (int a = 0; a < 3; ++a) put_field(out, lf.b0[a]);
  for (int a = 0; a < 3; ++a) put_field(out, lf.b1[a]);
  finish_write(out);
}

LowFrequencyData read_low_frequency(std::istream& in) {
  const Header h = read_header(in, "LF");
  LowFrequencyData lf = LowFrequencyData::zeros(grid_from(h));
  const std::size_t n = lf.grid->size();
  lf.n1 = get_field(in, n);
  for (int a = 0; a < 3; ++a) lf.b0[a] = get_field(in, n);
  for (int a = 0; a < 3; ++a) lf.b1[a] = get_field(in, n);
  return lf;
}

void save_state(const std::filesystem::path& path, const SystemState& state) {
  to_file(path, [&](std::ostream& out) { write_state(out, state); });
}

SystemState load_state(const std::filesystem::path& path, double s) {
  return from_file(path, [&](std::istream& in) { return read_state(in, s); });
}

void save_ground_state(const std::filesystem::path& path, const GroundState& gs) {
  to_file(path, [&](std::ostream& out) { write_ground_state(out, gs); });
}

GroundState load_ground_state(const std::filesystem::path& path) {
  return from_file(path, [](std::istream& in) { return read_ground_state(in); });
}

void save_low_frequency(const std::filesystem::path& path, const LowFrequencyData& lf) {
  to_file(path, [&](std::ostream& out) { write_low_frequency(out, lf); });
}

LowFrequencyData load_low_frequency(const std::filesystem::path& path) {
  return from_file(path, [](std::istream& in) { return read_low_frequency(in); });
}

}  // namespace magzak::snapshot
