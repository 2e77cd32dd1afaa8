// Copyright (c) 2026 The gridflow Authors.
// Licensed under the Apache License, Version 2.0.

#include "io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

namespace gridflow {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<std::vector<std::string>> read_csv(const std::string& path,
                                               const std::string& header) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line))
    throw InvalidInput(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header)
    throw InvalidInput(path + ": expected header '" + header + "', got '" +
                       line + "'");
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    rows.push_back(split_csv_line(line));
  }
  return rows;
}

double parse_cap(const std::string& s, const std::string& path) {
  if (s == "inf") return kInf;
  try {
    size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InvalidInput(path + ": bad numeric value '" + s + "'");
  }
}

double parse_num(const std::string& s, const std::string& path) {
  const double v = parse_cap(s, path);
  if (!is_finite(v)) throw InvalidInput(path + ": unexpected 'inf'");
  return v;
}

}  // namespace

std::string fmt6(double v) {
  if (!is_finite(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";  // avoid "-0"
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidInput("cannot write " + path);
  out << content;
  if (!out) throw InvalidInput("write failed for " + path);
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string digest_hex(const std::string& bytes) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

std::string file_digest(const std::string& path) {
  return digest_hex(read_file(path));
}

std::vector<LinkSpec> read_topology_csv(const std::string& path) {
  auto rows = read_csv(path, "link_id,from_iso,to_iso");
  std::vector<LinkSpec> links;
  links.reserve(rows.size());
  for (const auto& r : rows) {
    if (r.size() != 3) throw InvalidInput(path + ": malformed row");
    LinkSpec l;
    l.id = static_cast<int>(parse_num(r[0], path));
    l.from = r[1];
    l.to = r[2];
    links.push_back(l);
  }
  return links;
}

std::vector<Node> read_mean_loads_csv(const std::string& path) {
  auto rows = read_csv(path, "iso,mean_load_gw");
  std::vector<Node> nodes;
  nodes.reserve(rows.size());
  for (const auto& r : rows) {
    if (r.size() != 2) throw InvalidInput(path + ": malformed row");
    Node n;
    n.id = r[0];
    n.mean_load = parse_num(r[1], path);
    nodes.push_back(n);
  }
  return nodes;
}

Topology make_topology(std::vector<Node> nodes,
                       const std::vector<LinkSpec>& links) {
  std::unordered_map<std::string, int> index;
  for (size_t i = 0; i < nodes.size(); ++i)
    index[nodes[i].id] = static_cast<int>(i);
  std::vector<Link> resolved;
  resolved.reserve(links.size());
  for (const auto& l : links) {
    auto fi = index.find(l.from);
    auto ti = index.find(l.to);
    if (fi == index.end())
      throw InvalidInput("link references unknown node " + l.from);
    if (ti == index.end())
      throw InvalidInput("link references unknown node " + l.to);
    resolved.push_back({l.id, fi->second, ti->second});
  }
  return Topology(std::move(nodes), std::move(resolved));
}

CapacityLayout read_layout_csv(const Topology& topo, const std::string& path) {
  auto rows = read_csv(path, "from_iso,to_iso,cap_forward_gw,cap_backward_gw");
  CapacityLayout layout = CapacityLayout::zero(topo.link_count());
  std::vector<char> seen(topo.link_count(), 0);
  for (const auto& r : rows) {
    if (r.size() != 4) throw InvalidInput(path + ": malformed row");
    const int a = topo.node_index(r[0]);
    const int b = topo.node_index(r[1]);
    if (a < 0 || b < 0)
      throw InvalidInput(path + ": unknown node in row " + r[0] + "," + r[1]);
    const double fwd = parse_cap(r[2], path);
    const double bwd = parse_cap(r[3], path);
    if (fwd < 0 || bwd < 0) throw InvalidInput(path + ": negative capacity");
    int found = -1;
    bool flipped = false;
    for (int l = 0; l < topo.link_count(); ++l) {
      if (topo.links()[l].from == a && topo.links()[l].to == b) {
        found = l;
      } else if (topo.links()[l].from == b && topo.links()[l].to == a) {
        found = l;
        flipped = true;
      }
      if (found >= 0) break;
    }
    if (found < 0)
      throw InvalidInput(path + ": no link " + r[0] + "-" + r[1] +
                         " in the topology");
    if (seen[found])
      throw InvalidInput(path + ": duplicate entry for link " + r[0] + "-" +
                         r[1]);
    seen[found] = 1;
    layout.forward[found] = flipped ? bwd : fwd;
    layout.backward[found] = flipped ? fwd : bwd;
  }
  for (int l = 0; l < topo.link_count(); ++l) {
    if (!seen[l])
      throw InvalidInput(path + ": missing capacity for link " +
                         topo.nodes()[topo.links()[l].from].id + "-" +
                         topo.nodes()[topo.links()[l].to].id);
  }
  return layout;
}

void write_layout_csv(const Topology& topo, const CapacityLayout& layout,
                      const std::string& path) {
  if (layout.link_count() != topo.link_count())
    throw InvalidInput("layout does not match the topology");
  std::string out = "from_iso,to_iso,cap_forward_gw,cap_backward_gw\n";
  for (int l = 0; l < topo.link_count(); ++l) {
    out += topo.nodes()[topo.links()[l].from].id + "," +
           topo.nodes()[topo.links()[l].to].id + "," +
           fmt6(layout.forward[l]) + "," + fmt6(layout.backward[l]) + "\n";
  }
  write_file(path, out);
}

std::vector<CountrySeries> read_series_csv(const Topology& topo,
                                           const std::string& path) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line)) throw InvalidInput(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto header = split_csv_line(line);
  if (header.empty() || header[0] != "hour")
    throw InvalidInput(path + ": series header must start with 'hour'");

  const int N = topo.node_count();
  std::vector<int> lcol(N, -1), wcol(N, -1), scol(N, -1);
  for (size_t c = 1; c < header.size(); ++c) {
    const std::string& h = header[c];
    if (h.size() < 3 || h[1] != '_')
      throw InvalidInput(path + ": bad series column '" + h + "'");
    const int n = topo.node_index(h.substr(2));
    if (n < 0) continue;  // extra countries are ignored
    if (h[0] == 'L')
      lcol[n] = static_cast<int>(c);
    else if (h[0] == 'W')
      wcol[n] = static_cast<int>(c);
    else if (h[0] == 'S')
      scol[n] = static_cast<int>(c);
    else
      throw InvalidInput(path + ": bad series column '" + h + "'");
  }
  for (int n = 0; n < N; ++n) {
    if (lcol[n] < 0 || wcol[n] < 0 || scol[n] < 0)
      throw InvalidInput(path + ": missing L/W/S columns for " +
                         topo.nodes()[n].id);
  }

  std::vector<CountrySeries> out(N);
  for (int n = 0; n < N; ++n) out[n].id = topo.nodes()[n].id;
  long long expect_hour = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    auto row = split_csv_line(line);
    if (row.size() != header.size())
      throw InvalidInput(path + ": ragged row at hour " +
                         std::to_string(expect_hour));
    if (static_cast<long long>(parse_num(row[0], path)) != expect_hour)
      throw InvalidInput(path + ": hours must be a 0-based running index");
    for (int n = 0; n < N; ++n) {
      out[n].load.push_back(parse_num(row[lcol[n]], path));
      out[n].wind_raw.push_back(parse_num(row[wcol[n]], path));
      out[n].solar_raw.push_back(parse_num(row[scol[n]], path));
    }
    ++expect_hour;
  }
  for (const auto& cs : out) validate(cs);
  return out;
}

void write_series_csv(const std::vector<CountrySeries>& series,
                      const std::string& path) {
  if (series.empty()) throw InvalidInput("no series to write");
  const size_t T = series.front().load.size();
  std::string out = "hour";
  for (const auto& cs : series)
    out += ",L_" + cs.id + ",W_" + cs.id + ",S_" + cs.id;
  out += "\n";
  for (size_t t = 0; t < T; ++t) {
    out += std::to_string(t);
    for (const auto& cs : series) {
      out += "," + fmt6(cs.load[t]) + "," + fmt6(cs.wind_raw[t]) + "," +
             fmt6(cs.solar_raw[t]);
    }
    out += "\n";
  }
  write_file(path, out);
}

SynthConfig read_synth_config(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(path + ": " + e.what());
  }
  SynthConfig cfg;
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  get("seed", cfg.seed);
  get("load_seasonal", cfg.load_seasonal);
  get("load_diurnal", cfg.load_diurnal);
  get("load_noise", cfg.load_noise);
  get("wind_seasonal", cfg.wind_seasonal);
  get("solar_seasonal", cfg.solar_seasonal);
  get("noise_persistence", cfg.noise_persistence);
  get("noise_amplitude", cfg.noise_amplitude);
  get("regional_weight", cfg.regional_weight);
  get("sunrise_hour", cfg.sunrise_hour);
  get("sunset_hour", cfg.sunset_hour);
  return cfg;
}

void write_flows_csv(const Topology& topo,
                     const std::vector<std::vector<double>>& flows_by_hour,
                     const std::string& path) {
  std::string out = "hour";
  for (const auto& l : topo.links()) {
    out += ",F_" + topo.nodes()[l.from].id + "_" + topo.nodes()[l.to].id;
  }
  out += "\n";
  for (size_t t = 0; t < flows_by_hour.size(); ++t) {
    out += std::to_string(t);
    for (double f : flows_by_hour[t]) out += "," + fmt6(f);
    out += "\n";
  }
  write_file(path, out);
}

std::vector<std::vector<double>> read_flows_csv(const Topology& topo,
                                                const std::string& path) {
  std::string header = "hour";
  for (const auto& l : topo.links()) {
    header += ",F_" + topo.nodes()[l.from].id + "_" + topo.nodes()[l.to].id;
  }
  auto rows = read_csv(path, header);
  std::vector<std::vector<double>> out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    if (static_cast<int>(r.size()) != topo.link_count() + 1)
      throw InvalidInput(path + ": ragged row");
    std::vector<double> f(topo.link_count());
    for (int l = 0; l < topo.link_count(); ++l)
      f[l] = parse_num(r[l + 1], path);
    out.push_back(std::move(f));
  }
  if (out.empty()) throw InvalidInput(path + ": no flow rows");
  return out;
}

}  // namespace gridflow
