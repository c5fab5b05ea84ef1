#pragma once

#include <algorithm>
#include <cctype>
#include <string>
#include <string_view>
#include <vector>

namespace reportrl {

// Structure checks for the expected "<think>...</think><report>...</report>"
// output shape. All flags are computed from the text alone; malformed input
// degrades flags but never throws.
struct FormatCheck {
  bool has_think = false;
  bool has_report = false;
  bool ordered = false;
  bool balanced = false;
  bool think_nonempty = false;
  bool report_nonempty = false;
  bool no_stray_text = false;
};

struct Sections {
  FormatCheck check;
  std::string think_body;
  std::string report_body;
};

namespace detail {

struct TagSpan {
  std::size_t open_begin;  // position of '<'
  std::size_t body_begin;
  std::size_t body_end;
  std::size_t close_end;  // one past '>'
};

struct TagScan {
  std::vector<TagSpan> spans;  // well-formed, non-overlapping, in order
  std::size_t open_count = 0;
  std::size_t close_count = 0;
  bool balanced = true;  // every open is followed by its close, no orphans
};

inline TagScan scan_tag(std::string_view text, std::string_view name) {
  const std::string open = "<" + std::string(name) + ">";
  const std::string close = "</" + std::string(name) + ">";
  TagScan scan;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t o = text.find(open, pos);
    const std::size_t c = text.find(close, pos);
    if (o == std::string_view::npos && c == std::string_view::npos) break;
    if (c < o) {  // closing tag with no open
      scan.balanced = false;
      ++scan.close_count;
      pos = c + close.size();
      continue;
    }
    ++scan.open_count;
    const std::size_t body = o + open.size();
    const std::size_t end = text.find(close, body);
    if (end == std::string_view::npos) {  // dangling open
      scan.balanced = false;
      pos = body;
      continue;
    }
    // Nested re-open inside the body counts as malformed.
    if (text.find(open, body) < end) scan.balanced = false;
    ++scan.close_count;
    scan.spans.push_back({o, body, end, end + close.size()});
    pos = end + close.size();
  }
  return scan;
}

inline bool whitespace_only(std::string_view s) {
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isspace(c) != 0; });
}

inline std::string_view trimmed(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace detail

// Single-pass tag parse. report_body is the content of the first well-formed
// report section; when report tags are absent or malformed it falls back to
// the whole text so downstream labeling still works on unstructured output.
inline Sections extract_sections(std::string_view text) {
  const auto think = detail::scan_tag(text, "think");
  const auto report = detail::scan_tag(text, "report");

  Sections out;
  out.check.has_think = !think.spans.empty();
  out.check.has_report = !report.spans.empty();
  out.check.balanced = think.balanced && report.balanced;
  out.check.ordered = out.check.has_think && out.check.has_report &&
                      think.spans.front().close_end <= report.spans.front().open_begin;

  if (out.check.has_think) {
    const auto& s = think.spans.front();
    out.think_body = std::string(text.substr(s.body_begin, s.body_end - s.body_begin));
  }
  if (out.check.has_report) {
    const auto& s = report.spans.front();
    out.report_body = std::string(text.substr(s.body_begin, s.body_end - s.body_begin));
  } else {
    out.report_body = std::string(text);
  }

  out.check.think_nonempty =
      out.check.has_think && !detail::trimmed(out.think_body).empty();
  out.check.report_nonempty =
      out.check.has_report && !detail::trimmed(out.report_body).empty();

  // Stray text = anything outside well-formed sections that is not whitespace.
  std::string outside;
  std::vector<detail::TagSpan> all = think.spans;
  all.insert(all.end(), report.spans.begin(), report.spans.end());
  std::sort(all.begin(), all.end(),
            [](const detail::TagSpan& a, const detail::TagSpan& b) {
              return a.open_begin < b.open_begin;
            });
  std::size_t cursor = 0;
  for (const auto& s : all) {
    if (s.open_begin > cursor) outside += text.substr(cursor, s.open_begin - cursor);
    cursor = std::max(cursor, s.close_end);
  }
  if (cursor < text.size()) outside += text.substr(cursor);
  out.check.no_stray_text = detail::whitespace_only(outside);

  return out;
}

// Structure-only score: 1 for full compliance, 0.5 when the only defect is an
// empty think section or stray text outside the tags, 0 otherwise.
inline double format_reward(std::string_view text) {
  const FormatCheck c = extract_sections(text).check;
  const bool core = c.has_think && c.has_report && c.ordered && c.balanced && c.report_nonempty;
  if (!core) return 0.0;
  const int minor_violations = (c.think_nonempty ? 0 : 1) + (c.no_stray_text ? 0 : 1);
  if (minor_violations == 0) return 1.0;
  if (minor_violations == 1) return 0.5;
  return 0.0;
}

}  // namespace reportrl
