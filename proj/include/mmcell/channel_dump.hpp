// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "channel.hpp"

namespace mmcell {

// Debug dump of one trial: a single JSON header line followed by every
// generated link as an M×P column-major block of little-endian complex64.
struct DumpedLink {
  int bs = 0;
  int cell = 0;
  int user = 0;
  CMatrix h;
};

struct ChannelDump {
  std::uint64_t seed = 0;
  int cells = 0;
  int users = 0;
  int bs_antennas = 0;
  int user_antennas = 0;
  std::vector<DumpedLink> links;
};

namespace detail {

inline void put_f32(std::ostream& out, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  unsigned char b[4] = {static_cast<unsigned char>(bits), static_cast<unsigned char>(bits >> 8),
                        static_cast<unsigned char>(bits >> 16), static_cast<unsigned char>(bits >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

inline float get_f32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw std::runtime_error("channel dump truncated");
  const std::uint32_t bits = b[0] | (b[1] << 8) | (b[2] << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
  float v;
  std::memcpy(&v, &bits, 4);
  return v;
}

}  // namespace detail

inline void write_channel_dump(const std::string& path, const ChannelSet& set) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  nlohmann::json links = nlohmann::json::array();
  for (int c = 0; c < set.cells(); ++c)
    for (int d = 0; d < set.cells(); ++d)
      for (int i = 0; i < set.users(); ++i)
        if (set.has_link(c, d, i)) links.push_back({c, d, i});
  const nlohmann::json header = {{"format", "mmcell-channels"}, {"version", 1},      {"seed", set.seed()},
                                 {"cells", set.cells()},         {"users", set.users()},
                                 {"M", set.bs_antennas()},      {"P", set.user_antennas()},
                                 {"dtype", "complex64-le"},     {"order", "column-major"},
                                 {"links", links}};
  out << header.dump() << '\n';
  for (const auto& l : links) {
    const CMatrix h = set.link(l[0], l[1], l[2]).matrix();
    for (Eigen::Index col = 0; col < h.cols(); ++col)
      for (Eigen::Index row = 0; row < h.rows(); ++row) {
        detail::put_f32(out, static_cast<float>(h(row, col).real()));
        detail::put_f32(out, static_cast<float>(h(row, col).imag()));
      }
  }
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

inline ChannelDump read_channel_dump(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("channel dump has no header");
  const auto header = nlohmann::json::parse(line);
  if (header.value("format", "") != "mmcell-channels") throw std::runtime_error("not a channel dump");
  ChannelDump dump;
  dump.seed = header.at("seed").get<std::uint64_t>();
  dump.cells = header.at("cells").get<int>();
  dump.users = header.at("users").get<int>();
  dump.bs_antennas = header.at("M").get<int>();
  dump.user_antennas = header.at("P").get<int>();
  for (const auto& l : header.at("links")) {
    DumpedLink link{l[0].get<int>(), l[1].get<int>(), l[2].get<int>(), CMatrix(dump.bs_antennas, dump.user_antennas)};
    for (Eigen::Index col = 0; col < link.h.cols(); ++col)
      for (Eigen::Index row = 0; row < link.h.rows(); ++row) {
        const float re = detail::get_f32(in);
        const float im = detail::get_f32(in);
        link.h(row, col) = {re, im};
      }
    dump.links.push_back(std::move(link));
  }
  return dump;
}

}  // namespace mmcell
