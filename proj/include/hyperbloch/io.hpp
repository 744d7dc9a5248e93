#pragma once

#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include "hyperbloch/bloch_hyperbolic.hpp"
#include "hyperbloch/hyperbolic_plane.hpp"
#include "hyperbloch/rep_variety.hpp"
#include "hyperbloch/surface_group.hpp"
#include <nlohmann/json.hpp>

// File formats: GammaFunction JSON, ensemble caches with SHA-256 checksums,
// cell and section exports, flux reports, CSV tables. All emitters are
// deterministic: doubles are printed in shortest round-trip form and JSON
// objects serialize with sorted keys.

namespace hyperbloch::io {

using json = nlohmann::json;

inline std::string format_double(double x) {
  std::array<char, 40> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

inline std::string sha256_hex(const std::string& data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(),
                 nullptr) != 1)
    throw std::runtime_error("sha256: digest failure");
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

inline void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot open output file: " + path);
  out << body;
  if (!out) throw std::runtime_error("short write: " + path);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open input file: " + path);
  std::ostringstream body;
  body << in.rdbuf();
  return body.str();
}

// ---------------------------------------------------------------------------
// GammaFunction: {"genus": g, "terms": [{"word": "a1 B2", "re": x, "im": y}]}

inline json gamma_function_to_json(const group::GammaFunction& psi) {
  json terms = json::array();
  for (const auto& [el, amp] : psi.terms()) {
    terms.push_back({{"word", group::word_to_string(el)},
                     {"re", amp.real()},
                     {"im", amp.imag()}});
  }
  return {{"genus", psi.genus()}, {"terms", terms}};
}

inline group::GammaFunction gamma_function_from_json(const json& j) {
  group::GammaFunction psi(j.at("genus").get<int>());
  for (const auto& term : j.at("terms")) {
    psi.add(group::parse_word(psi.genus(), term.at("word").get<std::string>()),
            {term.at("re").get<double>(), term.at("im").get<double>()});
  }
  return psi;
}

// ---------------------------------------------------------------------------
// Ensemble cache with checksum over the canonical serialization.

inline json ensemble_payload(const reps::RepEnsemble& e) {
  json members = json::array();
  for (const auto& rep : e.members) {
    json images = json::array();
    for (const auto& m : rep.images()) {
      json rows = json::array();
      for (int r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (int c = 0; c < m.cols(); ++c)
          row.push_back({m(r, c).real(), m(r, c).imag()});
        rows.push_back(std::move(row));
      }
      images.push_back(std::move(rows));
    }
    members.push_back({{"images", std::move(images)},
                       {"relator_residual", rep.relator_residual()},
                       {"defect", rep.irreducibility_defect()}});
  }
  return {{"rank", e.rank},
          {"genus", e.genus},
          {"seed", e.seed},
          {"members", std::move(members)}};
}

inline json ensemble_to_json(const reps::RepEnsemble& e) {
  json payload = ensemble_payload(e);
  json out = payload;
  out["checksum"] = sha256_hex(payload.dump());
  return out;
}

inline reps::RepEnsemble ensemble_from_json(const json& j) {
  json payload = j;
  payload.erase("checksum");
  const std::string expected = j.at("checksum").get<std::string>();
  if (sha256_hex(payload.dump()) != expected)
    throw std::invalid_argument("ensemble cache: checksum mismatch");

  reps::RepEnsemble e;
  e.rank = j.at("rank").get<int>();
  e.genus = j.at("genus").get<int>();
  e.seed = j.at("seed").get<std::uint64_t>();
  e.quadrature = reps::RepEnsemble::Quadrature::kMonteCarlo;
  for (const auto& member : j.at("members")) {
    std::vector<linalg::Matrix> images;
    for (const auto& mat : member.at("images")) {
      const int rows = static_cast<int>(mat.size());
      linalg::Matrix m(rows, rows);
      for (int r = 0; r < rows; ++r)
        for (int c = 0; c < rows; ++c)
          m(r, c) = {mat.at(r).at(c).at(0).get<double>(),
                     mat.at(r).at(c).at(1).get<double>()};
      images.push_back(std::move(m));
    }
    reps::UnitaryRep rep(e.genus, std::move(images), e.seed);
    rep.set_irreducibility_defect(member.at("defect").get<int>());
    e.members.push_back(std::move(rep));
  }
  return e;
}

// ---------------------------------------------------------------------------
// Cell export and SVG figure.

inline json cell_to_json(const geom::FundamentalCell& cell) {
  json neighbors = json::array();
  for (const auto& w : cell.neighbor_words)
    neighbors.push_back(group::word_to_string(w));
  json nodes = json::array();
  for (std::size_t i = 0; i < cell.nodes.size(); ++i)
    nodes.push_back({cell.nodes[i].z.real(), cell.nodes[i].z.imag(),
                     cell.weights[i]});
  return {{"genus", cell.genus},
          {"curvature", cell.curvature == geom::Curvature::kMinusOne ? -1 : -4},
          {"x0", {cell.center.z.real(), cell.center.z.imag()}},
          {"neighbors", std::move(neighbors)},
          {"nodes", std::move(nodes)}};
}

// Static figure: unit circle, cell boundary, and the first shell of
// neighboring tiles.
inline std::string cell_to_svg(const geom::FuchsianGroup& g,
                               const geom::FundamentalCell& cell) {
  constexpr double kScale = 360.0;
  constexpr double kOffset = 380.0;
  const auto pt = [&](std::complex<double> z) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(2) << kOffset + kScale * z.real()
      << "," << kOffset - kScale * z.imag();
    return s.str();
  };
  const auto polygon_path = [&](const geom::MobiusMap& map) {
    std::ostringstream path;
    const std::size_t nv = cell.vertices.size();
    for (std::size_t i = 0; i < nv; ++i) {
      const auto seg = geom::geodesic_segment(cell.vertices[i],
                                              cell.vertices[(i + 1) % nv]);
      for (int s = 0; s <= 24; ++s) {
        const std::complex<double> z = map.apply_complex(seg.point(s / 24.0));
        path << (i == 0 && s == 0 ? "M" : "L") << pt(z) << " ";
      }
    }
    path << "Z";
    return path.str();
  };

  std::ostringstream svg;
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='760' height='760' "
         "viewBox='0 0 760 760'>\n";
  svg << "<circle cx='" << kOffset << "' cy='" << kOffset << "' r='" << kScale
      << "' fill='none' stroke='#888' stroke-width='1'/>\n";
  for (const auto& w : cell.neighbor_words)
    svg << "<path d='" << polygon_path(g.evaluate(w))
        << "' fill='#dce6f2' stroke='#5b7da0' stroke-width='0.8'/>\n";
  svg << "<path d='" << polygon_path(geom::MobiusMap::identity())
      << "' fill='#f2e3c8' stroke='#20324a' stroke-width='1.6'/>\n";
  svg << "</svg>\n";
  return svg.str();
}

// ---------------------------------------------------------------------------
// Section export: per member, the node-aligned matrices (row-major [re, im]).

inline json section_to_json(std::size_t member_index,
                            const hbt::SectionSample& sample) {
  json nodes = json::array();
  for (const auto& m : sample.node_values) {
    json entries = json::array();
    for (int r = 0; r < m.rows(); ++r)
      for (int c = 0; c < m.cols(); ++c)
        entries.push_back({m(r, c).real(), m(r, c).imag()});
    nodes.push_back(std::move(entries));
  }
  return {{"member", member_index}, {"nodes", std::move(nodes)}};
}

inline json flux_report(double b, double flux_value) {
  const double k = std::round(flux_value);
  return {{"b", b},
          {"flux", flux_value},
          {"nearest_int", static_cast<long long>(k)},
          {"abs_err", std::abs(flux_value - k)}};
}

// ---------------------------------------------------------------------------
// CSV writers (deterministic row order; config echo in a '#' header line).

class CsvWriter {
 public:
  CsvWriter(std::string header_comment, std::string columns) {
    body_ << "# " << header_comment << "\n" << columns << "\n";
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) body_ << ",";
      body_ << cells[i];
    }
    body_ << "\n";
  }

  std::string str() const { return body_.str(); }

 private:
  std::ostringstream body_;
};

}  // namespace hyperbloch::io
