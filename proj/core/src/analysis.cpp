// Copyright 2026 The slamkit Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "slamkit/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "slamkit/error.hpp"
#include "slamkit/viridis.hpp"

namespace slamkit {

namespace {

void write_bytes(const std::string& path, const void* data, std::size_t n) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path + " for writing");
  f.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
  if (!f) throw IoError("failed writing " + path);
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n ") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

}  // namespace

AlignmentMap cosine_matrix(const SpeechTokenEmbeddings& speech, const Matrix& text) {
  std::vector<std::string> labels;
  for (Eigen::Index j = 0; j < text.rows(); ++j) labels.push_back(std::to_string(j));
  return cosine_matrix(speech, text, std::move(labels));
}

AlignmentMap cosine_matrix(const SpeechTokenEmbeddings& speech, const Matrix& text,
                           std::vector<std::string> col_labels) {
  const Matrix& e = speech.embeddings;
  require(e.rows() == 0 || text.rows() == 0 || e.cols() == text.cols(),
          "speech and text embeddings differ in dimension (" + std::to_string(e.cols()) +
              " vs " + std::to_string(text.cols()) + ")");
  require(static_cast<Eigen::Index>(col_labels.size()) == text.rows(),
          "column label count does not match the text embeddings");
  AlignmentMap m;
  m.values = Matrix::Zero(e.rows(), text.rows());
  m.col_labels = std::move(col_labels);
  const Vector en = e.rowwise().norm();
  const Vector tn = text.rowwise().norm();
  for (Eigen::Index i = 0; i < e.rows(); ++i) {
    m.row_labels.push_back(std::to_string(i));
    m.zero_rows.push_back(en[i] == 0.0);
  }
  for (Eigen::Index j = 0; j < text.rows(); ++j) m.zero_cols.push_back(tn[j] == 0.0);
  for (Eigen::Index i = 0; i < e.rows(); ++i) {
    if (en[i] == 0.0) continue;
    for (Eigen::Index j = 0; j < text.rows(); ++j) {
      if (tn[j] == 0.0) continue;
      const double c = e.row(i).dot(text.row(j)) / (en[i] * tn[j]);
      m.values(i, j) = std::clamp(c, -1.0, 1.0);
    }
  }
  return m;
}

std::vector<int> column_argmax(const AlignmentMap& map) {
  std::vector<int> out;
  const auto rows = map.rows(), cols = map.cols();
  for (Eigen::Index j = 0; j < cols; ++j) {
    // Exact ties (repeated tokens give identical rows) go to the row nearest
    // the diagonal, then to the earlier row.
    const double diag = cols > 1 ? static_cast<double>(j) * (rows - 1) / (cols - 1) : 0.0;
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < rows; ++i) {
      const double v = map.values(i, j), b = map.values(best, j);
      if (v > b || (v == b && std::abs(i - diag) < std::abs(best - diag))) best = i;
    }
    out.push_back(rows > 0 ? static_cast<int>(best) : -1);
  }
  return out;
}

std::vector<NearestToken> nearest_tokens(const SpeechTokenEmbeddings& speech, const ToyLM& lm,
                                         Metric metric) {
  return nearest_tokens(speech, lm.embeddings(), metric);
}

std::vector<NearestToken> nearest_tokens(const SpeechTokenEmbeddings& speech, const Matrix& table,
                                         Metric metric) {
  const Matrix& e = speech.embeddings;
  require(e.rows() == 0 || e.cols() == table.cols(),
          "speech tokens and embedding table differ in dimension");
  require(table.rows() > 0, "embedding table is empty");
  const Vector tn = table.rowwise().norm();
  std::vector<NearestToken> out;
  for (Eigen::Index i = 0; i < e.rows(); ++i) {
    NearestToken best;
    if (metric == Metric::kCosine) {
      const double n = e.row(i).norm();
      if (n == 0.0) {
        best.flagged = true;
        out.push_back(best);
        continue;
      }
      best.score = -std::numeric_limits<double>::infinity();
      for (Eigen::Index v = 0; v < table.rows(); ++v) {
        const double c = tn[v] == 0.0 ? 0.0 : std::clamp(e.row(i).dot(table.row(v)) / (n * tn[v]), -1.0, 1.0);
        if (c > best.score) {
          best.score = c;
          best.token = static_cast<TokenId>(v);
        }
      }
    } else {
      best.score = std::numeric_limits<double>::infinity();
      for (Eigen::Index v = 0; v < table.rows(); ++v) {
        const double d = (e.row(i) - table.row(v)).norm();
        if (d < best.score) {
          best.score = d;
          best.token = static_cast<TokenId>(v);
        }
      }
    }
    out.push_back(best);
  }
  return out;
}

int colormap_index(double value) {
  const double v = std::clamp(value, -1.0, 1.0);
  return static_cast<int>(std::lround((v + 1.0) * 0.5 * 255.0));
}

std::vector<std::uint8_t> heatmap_ppm(const AlignmentMap& map, int cell) {
  require(!map.empty(), "cannot render an empty alignment map");
  require(cell >= 1, "cell size must be >= 1");
  const auto w = static_cast<int>(map.cols()) * cell;
  const auto h = static_cast<int>(map.rows()) * cell;
  const std::string header = "P6\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(out.size() + static_cast<std::size_t>(w) * h * 3);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const auto& rgb = kViridis[colormap_index(map.values(y / cell, x / cell))];
      out.insert(out.end(), rgb.begin(), rgb.end());
    }
  }
  return out;
}

std::string heatmap_svg(const AlignmentMap& map, int cell) {
  require(!map.empty(), "cannot render an empty alignment map");
  const int left = 48, top = 56;
  const int w = left + static_cast<int>(map.cols()) * cell + 8;
  const int h = top + static_cast<int>(map.rows()) * cell + 8;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
     << "\" font-family=\"monospace\" font-size=\"10\">\n";
  char color[8];
  for (Eigen::Index i = 0; i < map.rows(); ++i) {
    for (Eigen::Index j = 0; j < map.cols(); ++j) {
      const auto& rgb = kViridis[colormap_index(map.values(i, j))];
      std::snprintf(color, sizeof(color), "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
      os << "<rect x=\"" << left + j * cell << "\" y=\"" << top + i * cell << "\" width=\"" << cell
         << "\" height=\"" << cell << "\" fill=\"" << color << "\"/>\n";
    }
  }
  for (Eigen::Index j = 0; j < map.cols(); ++j) {
    const int x = left + static_cast<int>(j) * cell + cell / 2;
    os << "<text x=\"" << x << "\" y=\"" << top - 4 << "\" transform=\"rotate(-60 " << x << ' '
       << top - 4 << ")\">" << xml_escape(map.col_labels[j]) << "</text>\n";
  }
  for (Eigen::Index i = 0; i < map.rows(); ++i) {
    os << "<text x=\"" << left - 4 << "\" y=\"" << top + i * cell + cell * 3 / 4
       << "\" text-anchor=\"end\">" << xml_escape(map.row_labels[i]) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void export_heatmap(const AlignmentMap& map, const std::string& path, int cell) {
  const bool svg = path.size() >= 4 && path.compare(path.size() - 4, 4, ".svg") == 0;
  if (svg) {
    const std::string s = heatmap_svg(map, cell > 0 ? cell : 16);
    write_bytes(path, s.data(), s.size());
  } else {
    const auto b = heatmap_ppm(map, cell > 0 ? cell : 1);
    write_bytes(path, b.data(), b.size());
  }
}

std::string map_csv(const AlignmentMap& map) {
  std::ostringstream os;
  os << "speech\\text";
  for (const auto& c : map.col_labels) os << ',' << csv_field(c);
  os << '\n';
  char buf[32];
  for (Eigen::Index i = 0; i < map.rows(); ++i) {
    os << map.row_labels[i];
    for (Eigen::Index j = 0; j < map.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), ",%.6f", map.values(i, j));
      os << buf;
    }
    os << '\n';
  }
  return os.str();
}

std::string AlignmentBundle::tokens_text(const Vocabulary& vocab) const {
  auto line = [&](const TokenSequence& t) {
    std::string s;
    for (TokenId id : t) {
      if (!s.empty()) s += ' ';
      s += vocab.piece(id);
    }
    return s;
  };
  TokenSequence near;
  for (const auto& n : nearest) near.push_back(n.token);
  return line(reference) + "\n" + line(near) + "\n" + line(decoded) + "\n";
}

AlignmentBundle alignment_report(const ToyLM& lm, const Projector& projector, int k,
                                 const LoraSet* lora, const FrameSequence& frames,
                                 const TokenSequence& reference, const AlignmentOptions& options) {
  if (!options.allow_untrained && projector.trained_epochs <= 0) {
    throw ValidationError("refusing alignment probe: projector checkpoint is untrained");
  }
  AlignmentBundle b;
  if (frames.n_frames() == 0) return b;
  b.reference = reference;
  const DownsampledFeatures z = downsample_stack(frames, k);
  const SpeechTokenEmbeddings speech{projector_forward(projector, z.features)};
  std::vector<std::string> labels;
  for (TokenId t : reference) labels.push_back(lm.vocab().piece(t));
  b.map = cosine_matrix(speech, lm.embed(reference), std::move(labels));
  b.nearest = nearest_tokens(speech, lm);
  const AssembledPrompt p = assemble_prompt(options.layout, speech.embeddings, lm);
  LmScorer scorer(lm, p.inputs, lora);
  b.decoded = decode(scorer, options.decode).tokens;
  return b;
}

void write_alignment_bundle(const std::string& dir, const AlignmentBundle& bundle,
                            const Vocabulary& vocab) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir + ": " + ec.message());
  const std::string csv = map_csv(bundle.map);
  write_bytes(dir + "/map.csv", csv.data(), csv.size());
  const std::string svg = bundle.map.empty()
                              ? std::string("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"0\" height=\"0\"/>\n")
                              : heatmap_svg(bundle.map);
  write_bytes(dir + "/map.svg", svg.data(), svg.size());
  const std::string tokens = bundle.tokens_text(vocab);
  write_bytes(dir + "/tokens.txt", tokens.data(), tokens.size());
}

}  // namespace slamkit
