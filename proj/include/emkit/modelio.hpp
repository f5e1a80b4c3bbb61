#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "emkit/kgrid.hpp"
#include "emkit/model.hpp"

namespace emkit {

namespace ini {

struct Line {
  int number = 0;
  std::string text;
};

// Sectioned plain-text format: [section] headers, '#' comments, and either
// bare data rows or 'key = value' rows inside a section.
struct File {
  std::map<std::string, std::vector<Line>> sections;
  std::vector<std::string> section_order;

  static File parse(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    return parse_stream(in, path);
  }

  static File parse_stream(std::istream& in, const std::string& name) {
    File f;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos) continue;
      auto last = line.find_last_not_of(" \t\r");
      line = line.substr(first, last - first + 1);
      if (line.front() == '[') {
        if (line.back() != ']')
          throw ParseError(name + ":" + std::to_string(lineno) +
                           ": unterminated section header");
        section = line.substr(1, line.size() - 2);
        if (!f.sections.count(section)) f.section_order.push_back(section);
        f.sections[section];
        continue;
      }
      if (section.empty())
        throw ParseError(name + ":" + std::to_string(lineno) +
                         ": data before any [section] header");
      f.sections[section].push_back({lineno, line});
    }
    return f;
  }

  bool has(const std::string& s) const { return sections.count(s) > 0; }
  const std::vector<Line>& lines(const std::string& s) const {
    static const std::vector<Line> empty;
    auto it = sections.find(s);
    return it == sections.end() ? empty : it->second;
  }

  // value of 'key = ...' inside a section, or empty string
  std::string value(const std::string& s, const std::string& key) const {
    for (const auto& l : lines(s)) {
      const auto eq = l.text.find('=');
      if (eq == std::string::npos) continue;
      std::string k = l.text.substr(0, eq);
      k.erase(k.find_last_not_of(" \t") + 1);
      if (k == key) {
        std::string v = l.text.substr(eq + 1);
        v.erase(0, v.find_first_not_of(" \t"));
        return v;
      }
    }
    return {};
  }
};

}  // namespace ini

struct ParsedModel {
  TightBindingModel model;
  KPointGrid kgrid;
};

// Model definition file with sections [lattice], [sites], [orbitals],
// [hoppings], [electrons], [kgrid]. See the README for the exact schema.
inline ParsedModel read_model_file(const std::string& path) {
  const ini::File f = ini::File::parse(path);
  for (const char* s : {"lattice", "sites", "orbitals", "electrons"})
    if (!f.has(s))
      throw ParseError(path + ": missing required section [" + s + "]");

  auto fail = [&](const ini::Line& l, const std::string& why) -> void {
    throw ParseError(path + ":" + std::to_string(l.number) + ": " + why);
  };

  Mat3 lattice = Mat3::Zero();
  int dim = 3;
  {
    int row = 0;
    for (const auto& l : f.lines("lattice")) {
      if (l.text.find('=') != std::string::npos) {
        std::istringstream ss(f.value("lattice", "dimensionality"));
        if (!(ss >> dim)) fail(l, "bad dimensionality value");
        continue;
      }
      if (row >= 3) fail(l, "more than three lattice vectors");
      std::istringstream ss(l.text);
      if (!(ss >> lattice(row, 0) >> lattice(row, 1) >> lattice(row, 2)))
        fail(l, "lattice vector needs three components (Angstrom)");
      ++row;
    }
    if (row != 3)
      throw ParseError(path + ": [lattice] needs exactly three vectors");
  }

  std::vector<BasisSite> sites;
  for (const auto& l : f.lines("sites")) {
    BasisSite s;
    std::istringstream ss(l.text);
    if (!(ss >> s.species >> s.ionic_charge >> s.frac_pos[0] >> s.frac_pos[1] >>
          s.frac_pos[2]))
      fail(l, "site row: species ionic_charge fx fy fz");
    sites.push_back(s);
  }

  std::vector<Orbital> orbitals;
  for (const auto& l : f.lines("orbitals")) {
    Orbital o;
    std::istringstream ss(l.text);
    if (!(ss >> o.site >> o.label >> o.onsite_ev >> o.center_frac[0] >>
          o.center_frac[1] >> o.center_frac[2]))
      fail(l, "orbital row: site label onsite_eV fx fy fz");
    orbitals.push_back(o);
  }

  std::vector<Hopping> hoppings;
  for (const auto& l : f.lines("hoppings")) {
    Hopping h;
    double re, im;
    std::istringstream ss(l.text);
    if (!(ss >> h.from >> h.to >> h.cell[0] >> h.cell[1] >> h.cell[2] >> re >> im))
      fail(l, "hopping row: i j R1 R2 R3 re im");
    h.amplitude_ev = cplx(re, im);
    hoppings.push_back(h);
  }

  int electrons = 0;
  {
    const auto& rows = f.lines("electrons");
    if (rows.size() != 1)
      throw ParseError(path + ": [electrons] needs exactly one row");
    std::istringstream ss(rows[0].text);
    if (!(ss >> electrons)) fail(rows[0], "electron count must be an integer");
  }

  int n1 = 1, n2 = 1, n3 = 1;
  if (f.has("kgrid")) {
    const auto& rows = f.lines("kgrid");
    if (rows.size() != 1)
      throw ParseError(path + ": [kgrid] needs exactly one row");
    std::istringstream ss(rows[0].text);
    if (!(ss >> n1 >> n2 >> n3)) fail(rows[0], "kgrid row: N1 N2 N3");
  }

  LatticeGeometry geom(lattice, std::move(sites), dim);
  return ParsedModel{TightBindingModel(std::move(geom), std::move(orbitals),
                                       std::move(hoppings), electrons),
                     KPointGrid(n1, n2, n3)};
}

inline void write_model_file(const std::string& path,
                             const TightBindingModel& m,
                             const KPointGrid& grid) {
  std::ofstream out(path);
  if (!out) throw ValidationError("write_model_file: cannot open " + path);
  char buf[256];
  out << "[lattice]\n";
  const Mat3& a = m.geometry().lattice();
  for (int i = 0; i < 3; ++i) {
    std::snprintf(buf, sizeof buf, "%.12g %.12g %.12g\n", a(i, 0), a(i, 1), a(i, 2));
    out << buf;
  }
  out << "dimensionality = " << m.geometry().dimensionality() << "\n";
  out << "[sites]\n";
  for (const auto& s : m.geometry().sites()) {
    std::snprintf(buf, sizeof buf, "%s %.12g %.12g %.12g %.12g\n",
                  s.species.c_str(), s.ionic_charge, s.frac_pos[0], s.frac_pos[1],
                  s.frac_pos[2]);
    out << buf;
  }
  out << "[orbitals]\n";
  for (const auto& o : m.orbitals()) {
    std::snprintf(buf, sizeof buf, "%d %s %.12g %.12g %.12g %.12g\n", o.site,
                  o.label.c_str(), o.onsite_ev, o.center_frac[0],
                  o.center_frac[1], o.center_frac[2]);
    out << buf;
  }
  out << "[hoppings]\n";
  for (const auto& h : m.hoppings()) {
    std::snprintf(buf, sizeof buf, "%d %d %d %d %d %.12g %.12g\n", h.from, h.to,
                  h.cell[0], h.cell[1], h.cell[2], h.amplitude_ev.real(),
                  h.amplitude_ev.imag());
    out << buf;
  }
  out << "[electrons]\n" << m.electron_count() << "\n";
  out << "[kgrid]\n"
      << grid.divisions()[0] << " " << grid.divisions()[1] << " "
      << grid.divisions()[2] << "\n";
}

}  // namespace emkit
