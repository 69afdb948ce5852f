#include "report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "errors.hpp"
#include "format.hpp"

namespace relrank {

nlohmann::ordered_json json_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  return v;
}

std::string sanitize_filename(const std::string& name) {
  std::string out;
  for (char c : name) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
              c == '-' || c == '_' || c == '.';
    out.push_back(ok ? c : '_');
  }
  return out.empty() ? "unnamed" : out;
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot create " + path.string());
  out << text;
  if (!out) throw io_error("write failed for " + path.string());
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

}  // namespace

std::string svg_chart(const RankFamily& family) {
  constexpr double W = 640, H = 420;
  constexpr double L = 60, R = 20, T = 40, B = 50;
  double plot_w = W - L - R;
  double plot_h = H - T - B;

  double x_max = 0.0, y_max = 0.0;
  for (const StepFun& f : family.ranks) {
    if (!f.jumps().empty()) x_max = std::max(x_max, f.jumps().back());
    y_max = std::max(y_max, f.values()[0]);
  }
  if (x_max <= 0.0) x_max = 1.0;
  if (y_max <= 0.0) y_max = 1.0;
  x_max *= 1.05;
  y_max *= 1.08;

  auto sx = [&](double t) { return L + plot_w * t / x_max; };
  auto sy = [&](double v) { return T + plot_h * (1.0 - v / y_max); };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + format_double(W) +
       "\" height=\"" + format_double(H) + "\" viewBox=\"0 0 " + format_double(W) + " " +
       format_double(H) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  s += "<text x=\"" + format_double(L) + "\" y=\"24\" font-family=\"sans-serif\" "
       "font-size=\"15\" fill=\"#222\">" + family.name + "</text>\n";

  for (int g = 0; g <= 5; ++g) {
    double vy = y_max * g / 5.0;
    double py = sy(vy);
    s += "<line x1=\"" + format_double(L) + "\" y1=\"" + format_double(py) + "\" x2=\"" +
         format_double(W - R) + "\" y2=\"" + format_double(py) +
         "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    s += "<text x=\"" + format_double(L - 8) + "\" y=\"" + format_double(py + 4) +
         "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#555\" text-anchor=\"end\">" +
         format_double(std::round(vy * 100) / 100) + "</text>\n";
    double vx = x_max * g / 5.0;
    double px = sx(vx);
    s += "<text x=\"" + format_double(px) + "\" y=\"" + format_double(H - B + 18) +
         "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#555\" text-anchor=\"middle\">" +
         format_double(std::round(vx * 100) / 100) + "</text>\n";
  }
  s += "<line x1=\"" + format_double(L) + "\" y1=\"" + format_double(T) + "\" x2=\"" +
       format_double(L) + "\" y2=\"" + format_double(H - B) +
       "\" stroke=\"#333\" stroke-width=\"1\"/>\n";
  s += "<line x1=\"" + format_double(L) + "\" y1=\"" + format_double(H - B) + "\" x2=\"" +
       format_double(W - R) + "\" y2=\"" + format_double(H - B) +
       "\" stroke=\"#333\" stroke-width=\"1\"/>\n";

  for (std::size_t i = 0; i < family.ranks.size(); ++i) {
    const StepFun& f = family.ranks[i];
    const char* color = kPalette[i % 8];
    std::string path = "M " + format_double(sx(0)) + " " + format_double(sy(f.values()[0]));
    for (std::size_t k = 0; k < f.jumps().size(); ++k) {
      path += " H " + format_double(sx(f.jumps()[k]));
      path += " V " + format_double(sy(f.values()[k + 1]));
    }
    path += " H " + format_double(sx(x_max));
    s += "<path d=\"" + path + "\" fill=\"none\" stroke=\"" + color +
         "\" stroke-width=\"1.8\"/>\n";
  }

  for (std::size_t i = 0; i < family.labels.size() && i < family.ranks.size(); ++i) {
    double ly = T + 16.0 * static_cast<double>(i) + 8.0;
    s += "<rect x=\"" + format_double(W - R - 150) + "\" y=\"" + format_double(ly - 8) +
         "\" width=\"12\" height=\"4\" fill=\"" + std::string(kPalette[i % 8]) + "\"/>\n";
    s += "<text x=\"" + format_double(W - R - 132) + "\" y=\"" + format_double(ly) +
         "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#333\">" + family.labels[i] +
         "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

void emit_report(const Report& report, const std::set<std::string>& formats,
                 const std::filesystem::path& out_dir) {
  for (const std::string& f : formats) {
    if (f != "csv" && f != "json" && f != "svg") {
      throw std::invalid_argument("unknown report format \"" + f + "\"");
    }
  }
  std::filesystem::create_directories(out_dir);

  if (formats.count("json")) {
    nlohmann::ordered_json j = report.manifest;
    nlohmann::ordered_json fams = nlohmann::ordered_json::array();
    for (const RankFamily& fam : report.families) {
      nlohmann::ordered_json jf;
      jf["name"] = fam.name;
      nlohmann::ordered_json ranks = nlohmann::ordered_json::array();
      for (std::size_t i = 0; i < fam.ranks.size(); ++i) {
        nlohmann::ordered_json jr;
        jr["label"] = i < fam.labels.size() ? fam.labels[i] : std::to_string(i);
        jr["breakpoints"] = fam.ranks[i].jumps();
        jr["values"] = fam.ranks[i].values();
        jr["terminal"] = fam.ranks[i].terminal();
        ranks.push_back(jr);
      }
      jf["ranks"] = ranks;
      fams.push_back(jf);
    }
    j["families"] = fams;
    nlohmann::ordered_json tabs = nlohmann::ordered_json::array();
    for (const Table& t : report.tables) {
      nlohmann::ordered_json jt;
      jt["name"] = t.name;
      jt["columns"] = t.columns;
      nlohmann::ordered_json rows = nlohmann::ordered_json::array();
      for (const auto& r : t.rows) {
        nlohmann::ordered_json row = nlohmann::ordered_json::array();
        for (double v : r) row.push_back(json_number(v));
        rows.push_back(row);
      }
      jt["rows"] = rows;
      tabs.push_back(jt);
    }
    j["tables"] = tabs;
    write_text(out_dir / "manifest.json", j.dump(2) + "\n");
  }

  if (formats.count("csv")) {
    for (const RankFamily& fam : report.families) {
      for (std::size_t i = 0; i < fam.ranks.size(); ++i) {
        std::string label = i < fam.labels.size() ? fam.labels[i] : std::to_string(i);
        std::string fname = sanitize_filename(fam.name) + "_" + sanitize_filename(label) + ".csv";
        write_text(out_dir / fname, to_csv(fam.ranks[i]));
      }
    }
    for (const Table& t : report.tables) {
      std::string text;
      for (std::size_t c = 0; c < t.columns.size(); ++c) {
        if (c) text += ",";
        text += t.columns[c];
      }
      text += "\n";
      for (const auto& r : t.rows) {
        for (std::size_t c = 0; c < r.size(); ++c) {
          if (c) text += ",";
          text += format_double(r[c]);
        }
        text += "\n";
      }
      write_text(out_dir / (sanitize_filename(t.name) + ".csv"), text);
    }
  }

  if (formats.count("svg")) {
    for (const RankFamily& fam : report.families) {
      write_text(out_dir / (sanitize_filename(fam.name) + ".svg"), svg_chart(fam));
    }
  }
}

}  // namespace relrank
