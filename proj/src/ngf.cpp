#include "qngf/ngf.hpp"

#include <algorithm>
#include <cassert>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "qngf/error.hpp"
#include "qngf/random.hpp"

namespace qngf {

void GrowthConfig::validate() const {
  require(dimension >= 1, ErrorKind::invalid_parameter, "dimension must be >= 1");
  require(flavor >= -1 && flavor <= 1, ErrorKind::invalid_parameter,
          "flavor must be one of -1, 0, 1 (got " + std::to_string(flavor) + ")");
  require(nodes >= dimension + 1, ErrorKind::invalid_parameter,
          "node count must be at least dimension + 1");
}

SimplicialComplex::SimplicialComplex(int dimension, int flavor)
    : dimension_(dimension), flavor_(flavor), node_count_(dimension + 1) {
  NodeSet first(dimension + 1);
  for (int i = 0; i <= dimension; ++i) first[i] = i;
  simplices_.push_back(first);
  // Face i omits node d - i, so faces come out in lexicographic order.
  for (int skip = dimension; skip >= 0; --skip) {
    NodeSet face;
    for (int v : first)
      if (v != skip) face.push_back(v);
    add_face(std::move(face));
  }
}

int SimplicialComplex::incidence_of(const NodeSet& face) const {
  auto it = face_lookup_.find(face);
  return it == face_lookup_.end() ? -1 : incidence_[it->second];
}

void SimplicialComplex::add_face(NodeSet face) {
  face_lookup_.emplace(face, faces_.size());
  faces_.push_back(std::move(face));
  incidence_.push_back(0);
}

void SimplicialComplex::attach(std::size_t face) {
  assert(face < faces_.size());
  const int fresh = node_count_++;
  const NodeSet base = faces_[face];
  ++incidence_[face];

  NodeSet simplex = base;
  simplex.push_back(fresh);
  simplices_.push_back(simplex);

  // The new simplex's other faces all contain the new node and are new.
  for (std::size_t drop = 0; drop < base.size(); ++drop) {
    NodeSet f;
    for (std::size_t j = 0; j < base.size(); ++j)
      if (j != drop) f.push_back(base[j]);
    f.push_back(fresh);
    add_face(std::move(f));
  }
}

AttachmentWeights attachment_weights(const SimplicialComplex& complex) {
  AttachmentWeights out;
  out.weights.reserve(complex.faces().size());
  for (int n : complex.incidence()) {
    const std::int64_t w = 1 + static_cast<std::int64_t>(complex.flavor()) * n;
    out.weights.push_back(w);
    out.total += w;
  }
  return out;
}

SimplicialComplex grow(const GrowthConfig& config,
                       const std::function<void(const SimplicialComplex&)>& on_step) {
  config.validate();
  SimplicialComplex complex(config.dimension, config.flavor);
  Rng rng(config.seed);

  while (complex.node_count() < config.nodes) {
    const auto w = attachment_weights(complex);
    // Z_s > 0 holds for every valid flavor: each step adds unsaturated faces.
    assert(w.total > 0);
    std::int64_t target = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(w.total)));
    std::size_t chosen = 0;
    for (; chosen < w.weights.size(); ++chosen) {
      if (w.weights[chosen] <= 0) continue;
      if (target < w.weights[chosen]) break;
      target -= w.weights[chosen];
    }
    assert(chosen < w.weights.size());
    complex.attach(chosen);
    if (on_step) on_step(complex);
  }
  return complex;
}

std::vector<std::pair<int, int>> edges(const SimplicialComplex& complex) {
  std::set<std::pair<int, int>> unique;
  for (const auto& s : complex.simplices())
    for (std::size_t a = 0; a < s.size(); ++a)
      for (std::size_t b = a + 1; b < s.size(); ++b)
        unique.emplace(std::min(s[a], s[b]), std::max(s[a], s[b]));
  return {unique.begin(), unique.end()};
}

Eigen::MatrixXi adjacency_from_edges(int nodes, const std::vector<std::pair<int, int>>& edge_list) {
  Eigen::MatrixXi a = Eigen::MatrixXi::Zero(nodes, nodes);
  for (auto [i, j] : edge_list) {
    require(i >= 0 && j >= 0 && i < nodes && j < nodes && i != j, ErrorKind::invalid_input,
            "edge (" + std::to_string(i) + ", " + std::to_string(j) + ") out of range");
    a(i, j) = 1;
    a(j, i) = 1;
  }
  return a;
}

Eigen::MatrixXi to_adjacency(const SimplicialComplex& complex) {
  return adjacency_from_edges(complex.node_count(), edges(complex));
}

void write_edge_list(std::ostream& out, const SimplicialComplex& complex, std::uint64_t seed) {
  nlohmann::ordered_json header;
  header["d"] = complex.dimension();
  header["s"] = complex.flavor();
  header["N"] = complex.node_count();
  header["seed"] = seed;
  out << "# " << header.dump() << '\n';
  for (auto [i, j] : edges(complex)) out << i << ' ' << j << '\n';
}

EdgeListFile read_edge_list(std::istream& in) {
  EdgeListFile file;
  bool have_header = false;
  int max_node = -1;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto header = nlohmann::json::parse(line.substr(1), nullptr, false);
      require(!header.is_discarded() && header.contains("N"), ErrorKind::invalid_input,
              "malformed edge-list header: " + line);
      file.nodes = header.at("N").get<int>();
      file.dimension = header.value("d", 0);
      file.flavor = header.value("s", 0);
      file.seed = header.value("seed", std::uint64_t{0});
      have_header = true;
      continue;
    }
    std::istringstream fields(line);
    int i = 0, j = 0;
    require(static_cast<bool>(fields >> i >> j), ErrorKind::invalid_input, "malformed edge line: " + line);
    file.edges.emplace_back(std::min(i, j), std::max(i, j));
    max_node = std::max({max_node, i, j});
  }
  if (!have_header) file.nodes = max_node + 1;
  require(file.nodes > 0, ErrorKind::invalid_input, "edge list is empty");
  return file;
}

}  // namespace qngf
