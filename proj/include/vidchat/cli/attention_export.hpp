#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include "vidchat/attention/attention.hpp"
#include "vidchat/models/generative.hpp"

namespace vidchat::cli {

// Indices of the k largest weights, ties to the smaller index.
inline std::vector<std::size_t> top_k(const std::vector<double>& w, std::size_t k) {
  std::vector<std::size_t> idx(w.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return w[a] > w[b]; });
  idx.resize(std::min(k, idx.size()));
  return idx;
}

struct AttentionPanel {
  std::string title;
  std::vector<std::string> cols;
  std::vector<std::vector<double>> rows;  // one distribution per generated token
  std::size_t highlight = 0;              // top-k cells outlined per row
};

inline std::string xml_escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    switch (c) {
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '&': o += "&amp;"; break;
      case '"': o += "&quot;"; break;
      default: o += c;
    }
  }
  return o;
}

// Static heatmap: darker cells carry more weight, outlined cells are the
// per-token top-k.
inline void write_attention_svg(std::ostream& os, const std::vector<std::string>& tokens,
                                const std::vector<AttentionPanel>& panels) {
  const int cell = 18, left = 90, top = 30, gap = 70;
  int width = left, height = top;
  for (const auto& p : panels) {
    width = std::max(width, left + static_cast<int>(p.cols.size()) * cell + 20);
    height += static_cast<int>(tokens.size()) * cell + gap;
  }
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" font-family=\"monospace\" font-size=\"10\">\n";
  int y0 = top;
  for (const auto& p : panels) {
    os << "<text x=\"4\" y=\"" << y0 - 8 << "\" font-size=\"12\">" << xml_escape(p.title) << "</text>\n";
    for (std::size_t c = 0; c < p.cols.size(); ++c) {
      const int x = left + static_cast<int>(c) * cell + cell / 2;
      const int y = y0 + static_cast<int>(tokens.size()) * cell + 6;
      os << "<text x=\"" << x << "\" y=\"" << y << "\" transform=\"rotate(60 " << x << ' ' << y << ")\">"
         << xml_escape(p.cols[c]) << "</text>\n";
    }
    for (std::size_t r = 0; r < p.rows.size() && r < tokens.size(); ++r) {
      const int y = y0 + static_cast<int>(r) * cell;
      os << "<text x=\"4\" y=\"" << y + cell - 5 << "\">" << xml_escape(tokens[r]) << "</text>\n";
      const auto best = top_k(p.rows[r], p.highlight);
      for (std::size_t c = 0; c < p.rows[r].size(); ++c) {
        const int shade = 255 - static_cast<int>(std::clamp(p.rows[r][c], 0.0, 1.0) * 255.0);
        const bool mark = std::find(best.begin(), best.end(), c) != best.end();
        os << "<rect x=\"" << left + static_cast<int>(c) * cell << "\" y=\"" << y << "\" width=\"" << cell
           << "\" height=\"" << cell << "\" fill=\"rgb(" << shade << ',' << shade << ",255)\" stroke=\""
           << (mark ? "#d00000" : "#dddddd") << "\" stroke-width=\"" << (mark ? 2 : 1) << "\"/>\n";
      }
    }
    y0 += static_cast<int>(tokens.size()) * cell + gap;
  }
  os << "</svg>\n";
}

inline std::vector<double> flatten(const std::vector<std::vector<double>>& rows) {
  std::vector<double> out;
  for (const auto& r : rows) out.insert(out.end(), r.begin(), r.end());
  return out;
}

// Writes video.tsv, chat.tsv (for the sides the model attends to) and
// attention.svg into dir; returns the files written.
inline std::vector<std::filesystem::path> export_attention(const std::filesystem::path& dir,
                                                           const models::GenerativeModel& model,
                                                           const models::Example& e, const models::Generation& g) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> row_labels;
  for (std::size_t t = 0; t < g.tokens.size(); ++t) row_labels.push_back(std::to_string(t) + ":" + g.tokens[t]);
  std::vector<AttentionPanel> panels;
  std::vector<std::filesystem::path> files;
  auto emit = [&](const std::string& name, AttentionPanel panel) {
    const auto path = dir / (name + ".tsv");
    std::ofstream os(path);
    if (!os) throw DataError("cannot write " + path.string());
    attention::write_attention_tsv(os, row_labels, panel.cols, flatten(panel.rows));
    files.push_back(path);
    panels.push_back(std::move(panel));
  };
  if (!g.video_weights.empty()) {
    const std::size_t n = g.video_weights.front().size();
    const std::size_t offset = e.frames.rows() - n;  // earlier frames fell outside the cap
    AttentionPanel p{"video frames (top 3 outlined)", {}, g.video_weights, 3};
    for (std::size_t k = 0; k < n; ++k) p.cols.push_back("f" + std::to_string(offset + k));
    emit("video", std::move(p));
  }
  if (!g.chat_weights.empty()) {
    const std::size_t n = g.chat_weights.front().size();
    const auto ids = encoders::keep_last(e.chat, model.config().dims.chat_cap);
    AttentionPanel p{"chat tokens (top 10 outlined)", {}, g.chat_weights, 10};
    for (std::size_t k = 0; k < n; ++k) p.cols.push_back(model.vocab().token(ids[ids.size() - n + k]));
    emit("chat", std::move(p));
  }
  const auto svg = dir / "attention.svg";
  std::ofstream os(svg);
  if (!os) throw DataError("cannot write " + svg.string());
  write_attention_svg(os, g.tokens, panels);
  files.push_back(svg);
  return files;
}

}  // namespace vidchat::cli
