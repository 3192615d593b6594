#include "longae/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

namespace longae {

namespace {

[[noreturn]] void fail(const std::string& path, std::size_t line, const std::string& msg) {
  throw DataError(path + ":" + std::to_string(line) + ": " + msg);
}

bool skippable(const std::string& line) {
  const auto pos = line.find_first_not_of(" \t\r");
  return pos == std::string::npos || line[pos] == '#';
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

std::vector<std::string> split_on(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_real(const std::string& s, const std::string& path, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) fail(path, line, "trailing characters in number '" + s + "'");
    return v;
  } catch (const DataError&) {
    throw;
  } catch (const std::exception&) {
    fail(path, line, "not a number: '" + s + "'");
  }
}

Index intern_node(DatasetBundle& bundle, const std::string& name) {
  const auto [it, inserted] = bundle.node_index.try_emplace(name, Index(bundle.node_names.size()));
  if (inserted) bundle.node_names.push_back(name);
  return it->second;
}

struct LineReader {
  std::ifstream stream;
  std::string path;
  std::size_t line_no = 0;

  explicit LineReader(const std::string& p) : stream(p), path(p) {
    if (!stream) throw DataError(path + ": cannot open file");
  }

  bool next(std::string& out) {
    while (std::getline(stream, out)) {
      ++line_no;
      out = strip_cr(out);
      if (!skippable(out)) return true;
    }
    return false;
  }
};

// Little-endian scalar IO; byte order is part of the checkpoint format.
template <typename T>
void put_le(std::ofstream& out, T value) {
  auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(value);
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes.begin(), bytes.end());
  }
  out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <typename T>
T get_le(std::ifstream& in, const std::string& path) {
  std::array<unsigned char, sizeof(T)> bytes;
  in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T));
  if (in.gcount() != std::streamsize(sizeof(T))) {
    throw CheckpointError(CheckpointError::Code::truncated, path + ": truncated checkpoint");
  }
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes.begin(), bytes.end());
  }
  return std::bit_cast<T>(bytes);
}

constexpr std::array<char, 4> kMagic = {'L', 'G', 'A', 'E'};
constexpr std::uint32_t kVersion = 1;

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(path + ": cannot open for writing");
  return out;
}

}  // namespace

DatasetBundle load_dataset(const std::string& edge_path,
                           const std::optional<std::string>& feature_path,
                           const std::optional<std::string>& label_path,
                           const LoadOptions& options) {
  DatasetBundle bundle;

  std::vector<std::pair<Index, Index>> edges;
  {
    LineReader reader(edge_path);
    std::string line;
    while (reader.next(line)) {
      const auto cols = split_on(line, '\t');
      if (cols.size() != 2 || cols[0].empty() || cols[1].empty()) {
        fail(edge_path, reader.line_no, "expected src<TAB>dst");
      }
      const Index src = intern_node(bundle, cols[0]);
      const Index dst = intern_node(bundle, cols[1]);
      edges.emplace_back(src, dst);
    }
  }

  // Feature rows keyed by node, interned after the edge file.
  std::vector<std::pair<Index, std::vector<double>>> feature_rows;
  Index f_dim = -1;
  if (feature_path.has_value()) {
    LineReader reader(*feature_path);
    std::string line;
    while (reader.next(line)) {
      const auto cols = split_on(line, '\t');
      if (cols.size() != 2) fail(*feature_path, reader.line_no, "expected node<TAB>v1,v2,...");
      const Index node = intern_node(bundle, cols[0]);
      const auto items = split_on(cols[1], ',');
      std::vector<double> values(items.size());
      for (std::size_t k = 0; k < items.size(); ++k) {
        values[k] = parse_real(items[k], *feature_path, reader.line_no);
      }
      if (f_dim < 0) f_dim = Index(values.size());
      if (Index(values.size()) != f_dim) {
        fail(*feature_path, reader.line_no,
             "feature dim " + std::to_string(values.size()) + " differs from " +
                 std::to_string(f_dim));
      }
      feature_rows.emplace_back(node, std::move(values));
    }
    if (feature_rows.empty()) throw DataError(*feature_path + ": no feature rows");
  }

  struct LabelRow {
    Index node;
    std::string cls;
    NodeSplit split;
    std::size_t line;
  };
  std::vector<LabelRow> label_rows;
  if (label_path.has_value()) {
    LineReader reader(*label_path);
    std::string line;
    while (reader.next(line)) {
      const auto cols = split_on(line, '\t');
      if (cols.size() != 3) {
        fail(*label_path, reader.line_no, "expected node<TAB>class<TAB>split");
      }
      NodeSplit split;
      if (cols[2] == "train") split = NodeSplit::train;
      else if (cols[2] == "val") split = NodeSplit::val;
      else if (cols[2] == "test") split = NodeSplit::test;
      else if (cols[2] == "none") split = NodeSplit::none;
      else fail(*label_path, reader.line_no, "unknown split '" + cols[2] + "'");
      if (bundle.node_index.find(cols[0]) == bundle.node_index.end()) {
        fail(*label_path, reader.line_no, "label for unknown node '" + cols[0] + "'");
      }
      label_rows.push_back({bundle.node_id(cols[0]), cols[1], split, reader.line_no});
    }
  }

  const Index n = Index(bundle.node_names.size());
  if (n == 0) throw DataError(edge_path + ": dataset has no nodes");
  bundle.adjacency = build_adjacency(edges, n);

  if (feature_path.has_value()) {
    MatrixXd values = MatrixXd::Zero(f_dim, n);
    std::vector<bool> seen(std::size_t(n), false);
    for (const auto& [node, row] : feature_rows) {
      seen[std::size_t(node)] = true;
      for (Index k = 0; k < f_dim; ++k) values(k, node) = row[std::size_t(k)];
    }
    if (options.rescale_features) {
      for (Index k = 0; k < f_dim; ++k) {
        const double lo = values.row(k).minCoeff();
        const double hi = values.row(k).maxCoeff();
        if (hi > lo) {
          values.row(k) = (values.row(k).array() - lo) / (hi - lo);
        } else {
          values.row(k).setZero();
        }
      }
    } else if (values.size() > 0 &&
               (values.minCoeff() < 0.0 || values.maxCoeff() > 1.0)) {
      throw DataError(*feature_path +
                      ": feature values outside [0,1]; pass the rescale option to min-max "
                      "normalize");
    }
    (void)seen;  // nodes without a feature row keep zero features
    bundle.features.emplace(values.cast<float>());
  }

  if (label_path.has_value()) {
    std::vector<std::string> classes;
    std::unordered_map<std::string, std::int32_t> class_index;
    std::vector<std::int32_t> labels(std::size_t(n), -1);
    std::vector<NodeSplit> splits(std::size_t(n), NodeSplit::none);
    for (const auto& row : label_rows) {
      const auto [it, inserted] = class_index.try_emplace(row.cls, std::int32_t(classes.size()));
      if (inserted) classes.push_back(row.cls);
      if (labels[std::size_t(row.node)] >= 0) {
        fail(*label_path, row.line, "duplicate label for node '" +
                                        bundle.node_names[std::size_t(row.node)] + "'");
      }
      labels[std::size_t(row.node)] = it->second;
      splits[std::size_t(row.node)] = row.split;
    }
    bundle.labels.emplace(std::move(classes), std::move(labels), std::move(splits));
  }

  // Stats are recomputed from the loaded data.
  const auto counts = bundle.adjacency.offdiag_dyad_counts();
  bundle.stats.nodes = n;
  bundle.stats.features = bundle.features ? bundle.features->f() : 0;
  bundle.stats.classes = bundle.labels ? bundle.labels->num_classes() : 0;
  bundle.stats.average_degree = 2.0 * double(counts.present) / double(n);
  bundle.stats.imbalance_ratio =
      counts.present > 0 ? double(counts.absent) / double(counts.present) : 0.0;
  if (bundle.labels) {
    Index train_labeled = 0;
    for (Index i = 0; i < n; ++i) train_labeled += bundle.labels->train_mask(i);
    bundle.stats.label_rate = double(train_labeled) / double(n);
  }
  return bundle;
}

void save_checkpoint(const std::string& path, const ModelParams<float>& params) {
  std::ofstream out = open_out(path);
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, kVersion);
  put_le<std::uint32_t>(out, std::uint32_t(params.input_dim()));
  put_le<std::uint32_t>(out, std::uint32_t(params.hidden_dim()));
  put_le<std::uint32_t>(out, std::uint32_t(params.embedding_dim()));
  put_le<std::uint32_t>(out, std::uint32_t(params.num_classes()));
  visit_tensors(params, [&](const auto& tensor) {
    for (Index r = 0; r < tensor.rows(); ++r) {
      for (Index c = 0; c < tensor.cols(); ++c) put_le<float>(out, tensor(r, c));
    }
  });
  if (!out) throw DataError(path + ": write failed");
}

ModelParams<float> load_checkpoint(const std::string& path,
                                   const std::optional<CheckpointDims>& expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError(CheckpointError::Code::io, path + ": cannot open file");

  std::array<char, 4> magic;
  in.read(magic.data(), magic.size());
  if (in.gcount() != 4 || magic != kMagic) {
    throw CheckpointError(CheckpointError::Code::bad_magic, path + ": not a checkpoint file");
  }
  const auto version = get_le<std::uint32_t>(in, path);
  if (version != kVersion) {
    throw CheckpointError(CheckpointError::Code::bad_version,
                          path + ": unsupported checkpoint version " + std::to_string(version));
  }
  CheckpointDims dims;
  dims.input_dim = Index(get_le<std::uint32_t>(in, path));
  dims.hidden_dim = Index(get_le<std::uint32_t>(in, path));
  dims.embedding_dim = Index(get_le<std::uint32_t>(in, path));
  dims.num_classes = Index(get_le<std::uint32_t>(in, path));
  if (expected.has_value()) {
    if (dims.input_dim != expected->input_dim || dims.hidden_dim != expected->hidden_dim ||
        dims.embedding_dim != expected->embedding_dim ||
        dims.num_classes != expected->num_classes) {
      throw CheckpointError(
          CheckpointError::Code::dimension_mismatch,
          path + ": checkpoint dims (" + std::to_string(dims.input_dim) + "," +
              std::to_string(dims.hidden_dim) + "," + std::to_string(dims.embedding_dim) +
              "," + std::to_string(dims.num_classes) + ") do not match expected (" +
              std::to_string(expected->input_dim) + "," + std::to_string(expected->hidden_dim) +
              "," + std::to_string(expected->embedding_dim) + "," +
              std::to_string(expected->num_classes) + ")");
    }
  }

  ModelParams<float> params;
  params.V.resize(dims.hidden_dim, dims.input_dim);
  params.W.resize(dims.embedding_dim, dims.hidden_dim);
  params.b1.resize(dims.hidden_dim);
  params.b2.resize(dims.embedding_dim);
  params.b3.resize(dims.hidden_dim);
  params.b4.resize(dims.input_dim);
  if (dims.num_classes > 0) {
    params.U.resize(dims.num_classes, dims.hidden_dim);
    params.b5.resize(dims.num_classes);
  }
  visit_tensors(params, [&](auto& tensor) {
    for (Index r = 0; r < tensor.rows(); ++r) {
      for (Index c = 0; c < tensor.cols(); ++c) tensor(r, c) = get_le<float>(in, path);
    }
  });
  // Exactly at EOF now.
  char extra;
  in.read(&extra, 1);
  if (!in.eof()) {
    throw CheckpointError(CheckpointError::Code::truncated,
                          path + ": trailing bytes after tensors");
  }
  return params;
}

namespace {

void write_dyad_section(std::ofstream& out, const char* name,
                        const std::vector<Dyad>& dyads, int value) {
  out << "[" << name << "]\n";
  for (const Dyad& d : dyads) out << d.i << "\t" << d.j << "\t" << value << "\n";
}

}  // namespace

void write_split(const std::string& path, const EdgeSplit& split) {
  std::ofstream out = open_out(path);
  out << "seed=" << split.seed << "\n";
  out << "[train_observed]\n";
  for (const ObservedDyad& od : split.train_observed) {
    out << od.dyad.i << "\t" << od.dyad.j << "\t" << int(od.value) << "\n";
  }
  write_dyad_section(out, "val_pos", split.val_pos, 1);
  write_dyad_section(out, "val_neg", split.val_neg, 0);
  write_dyad_section(out, "test_pos", split.test_pos, 1);
  write_dyad_section(out, "test_neg", split.test_neg, 0);
  if (!out) throw DataError(path + ": write failed");
}

EdgeSplit read_split(const std::string& path) {
  LineReader reader(path);
  EdgeSplit split;
  std::string line;
  if (!reader.next(line) || line.rfind("seed=", 0) != 0) {
    fail(path, reader.line_no, "expected seed=<u64> header");
  }
  try {
    split.seed = std::stoull(line.substr(5));
  } catch (const std::exception&) {
    fail(path, reader.line_no, "invalid seed value");
  }

  enum class Section { none, train_observed, val_pos, val_neg, test_pos, test_neg };
  Section section = Section::none;
  std::set<Dyad> seen;
  while (reader.next(line)) {
    if (line == "[train_observed]") { section = Section::train_observed; continue; }
    if (line == "[val_pos]") { section = Section::val_pos; continue; }
    if (line == "[val_neg]") { section = Section::val_neg; continue; }
    if (line == "[test_pos]") { section = Section::test_pos; continue; }
    if (line == "[test_neg]") { section = Section::test_neg; continue; }
    if (section == Section::none) fail(path, reader.line_no, "line before any section");

    const auto cols = split_on(line, '\t');
    if (cols.size() != 3) fail(path, reader.line_no, "expected i<TAB>j<TAB>value");
    Index i = 0, j = 0;
    int value = 0;
    try {
      i = Index(std::stoll(cols[0]));
      j = Index(std::stoll(cols[1]));
      value = std::stoi(cols[2]);
    } catch (const std::exception&) {
      fail(path, reader.line_no, "invalid dyad line");
    }
    if (i == j) fail(path, reader.line_no, "diagonal dyad not allowed");
    if (i < 0 || j < 0) fail(path, reader.line_no, "negative node index");
    if (value != 0 && value != 1) fail(path, reader.line_no, "value must be 0 or 1");
    const Dyad d(i, j);
    if (!seen.insert(d).second) {
      fail(path, reader.line_no, "dyad (" + std::to_string(d.i) + "," + std::to_string(d.j) +
                                     ") appears in more than one set");
    }
    switch (section) {
      case Section::train_observed:
        split.train_observed.push_back({d, std::uint8_t(value)});
        break;
      case Section::val_pos:
        if (value != 1) fail(path, reader.line_no, "val_pos dyad must have value 1");
        split.val_pos.push_back(d);
        break;
      case Section::val_neg:
        if (value != 0) fail(path, reader.line_no, "val_neg dyad must have value 0");
        split.val_neg.push_back(d);
        break;
      case Section::test_pos:
        if (value != 1) fail(path, reader.line_no, "test_pos dyad must have value 1");
        split.test_pos.push_back(d);
        break;
      case Section::test_neg:
        if (value != 0) fail(path, reader.line_no, "test_neg dyad must have value 0");
        split.test_neg.push_back(d);
        break;
      case Section::none:
        break;
    }
  }
  return split;
}

void Report::set(const std::string& key, const std::string& value) {
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = value;
      return;
    }
  }
  entries_.emplace_back(key, value);
}

void Report::set(const std::string& key, double value) { set(key, format_double(value)); }

void Report::set(const std::string& key, std::int64_t value) {
  set(key, std::to_string(value));
}

void Report::set(const std::string& key, std::uint64_t value) {
  set(key, std::to_string(value));
}

bool Report::has(const std::string& key) const {
  return std::any_of(entries_.begin(), entries_.end(),
                     [&](const auto& kv) { return kv.first == key; });
}

const std::string& Report::get(const std::string& key) const {
  for (const auto& [k, v] : entries_) {
    if (k == key) return v;
  }
  throw std::out_of_range("report key '" + key + "' not present");
}

void write_report(const std::string& path, const Report& report) {
  std::ofstream out = open_out(path);
  for (const auto& [k, v] : report.entries()) out << k << "=" << v << "\n";
  if (!out) throw DataError(path + ": write failed");
}

void write_predictions(const std::string& path, const std::vector<ScoredDyad>& rows) {
  std::ofstream out = open_out(path);
  for (const ScoredDyad& row : rows) {
    out << row.i << "\t" << row.j << "\t" << format_double(row.score) << "\n";
  }
  if (!out) throw DataError(path + ": write failed");
}

void write_curve(const std::string& path,
                 const std::vector<std::pair<Index, double>>& curve) {
  for (std::size_t k = 1; k < curve.size(); ++k) {
    if (curve[k].first <= curve[k - 1].first) {
      throw std::invalid_argument("write_curve: k values must be strictly increasing");
    }
  }
  std::ofstream out = open_out(path);
  for (const auto& [k, v] : curve) out << k << "\t" << format_double(v) << "\n";
  if (!out) throw DataError(path + ": write failed");
}

}  // namespace longae
