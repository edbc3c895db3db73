#include "detaudit/score_file.hpp"

#include <algorithm>
#include <cstdio>

#include "jsonl.hpp"

namespace detaudit {

using nlohmann::json;

namespace {

template <typename T>
void sort_for_review(std::vector<T>& rows) {
  std::sort(rows.begin(), rows.end(), [](const T& a, const T& b) {
    if (a.score != b.score) return a.score < b.score;
    return a.image_id < b.image_id;
  });
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string objectlab_scores_to_jsonl(std::vector<ImageScore> scores, const json& header) {
  sort_for_review(scores);
  std::string out = detail::header_line(header);
  for (const auto& s : scores) {
    const json rec = {{"image_id", s.image_id},
                      {"method", "objectlab"},
                      {"score", s.score},
                      {"badloc", s.badloc},
                      {"swap", s.swap},
                      {"overlook", s.overlook},
                      {"per_box",
                       {{"badloc", s.badloc_boxes},
                        {"swap", s.swap_boxes},
                        {"overlook", s.overlook_boxes}}}};
    out += rec.dump();
    out += '\n';
  }
  return out;
}

std::string method_scores_to_jsonl(const std::string& method, std::vector<MethodScore> scores,
                                   const json& header) {
  sort_for_review(scores);
  std::string out = detail::header_line(header);
  for (const auto& s : scores) {
    const json rec = {{"image_id", s.image_id},
                      {"method", method},
                      {"score", s.score},
                      {"badloc", nullptr},
                      {"swap", nullptr},
                      {"overlook", nullptr},
                      {"per_box", json::object()}};
    out += rec.dump();
    out += '\n';
  }
  return out;
}

std::string objectlab_scores_to_csv(std::vector<ImageScore> scores) {
  sort_for_review(scores);
  std::string out = "image_id,score,badloc,swap,overlook\n";
  for (const auto& s : scores) {
    out += std::to_string(s.image_id) + "," + format_number(s.score) + "," +
           format_number(s.badloc) + "," + format_number(s.swap) + "," +
           format_number(s.overlook) + "\n";
  }
  return out;
}

ScoreMap parse_score_file(std::string_view text, const std::string& source,
                          const std::string& field) {
  ScoreMap scores;
  detail::for_each_record(text, source, [&](const json& rec, const std::string& where) {
    const ImageId id = detail::record_image_id(rec, source, where);
    auto it = rec.find(field);
    if (it == rec.end() || !it->is_number()) {
      throw ParseError(source, where + ": \"" + field + "\" must be a number");
    }
    if (!scores.emplace(id, it->get<double>()).second) {
      throw ParseError(source, where + ": duplicate image id " + std::to_string(id));
    }
  });
  return scores;
}

}  // namespace detaudit
