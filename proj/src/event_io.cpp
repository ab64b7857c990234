#include "dynppr/event_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

namespace dynppr {

NodeId NodeDictionary::intern(std::string_view label) {
  auto it = ids_.find(std::string(label));
  if (it != ids_.end()) return it->second;
  const auto id = static_cast<NodeId>(labels_.size());
  ids_.emplace(std::string(label), id);
  labels_.emplace_back(label);
  return id;
}

std::optional<NodeId> NodeDictionary::find(std::string_view label) const {
  auto it = ids_.find(std::string(label));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

template <typename T>
bool parse_decimal(std::string_view field, T& value) {
  if (field.empty()) return false;
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  return ec == std::errc{} && ptr == end;
}

std::string node_label(std::string_view field, IdMode mode, std::size_t line,
                       const char* which) {
  if (field.empty()) throw ParseError(line, std::string("empty ") + which + " id");
  if (mode == IdMode::kString) return std::string(field);
  std::uint64_t value = 0;
  if (field.front() == '+' || !parse_decimal(field, value)) {
    throw ParseError(line, std::string(which) + " id is not a decimal integer: '" +
                               std::string(field) + "'");
  }
  if (value >= std::numeric_limits<NodeId>::max()) {
    throw ParseError(line, std::string(which) + " id out of range");
  }
  return std::to_string(value);
}

}  // namespace

std::vector<EdgeEvent> read_events(std::istream& in, IdMode mode, NodeDictionary& dict) {
  std::vector<EdgeEvent> events;
  std::string line;
  std::size_t lineno = 0;
  std::int64_t last_ts = std::numeric_limits<std::int64_t>::min();
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line.front() == '#') continue;
    const auto fields = split_tabs(line);
    if (fields.size() != 4) {
      throw ParseError(lineno, "expected 4 TAB-separated fields, got " +
                                   std::to_string(fields.size()));
    }
    std::int64_t ts = 0;
    if (!parse_decimal(fields[0], ts)) {
      throw ParseError(lineno, "timestamp is not an integer: '" + std::string(fields[0]) + "'");
    }
    if (ts < last_ts) throw ParseError(lineno, "timestamp decreases");
    last_ts = ts;

    EdgeOp op;
    if (fields[3] == "I") {
      op = EdgeOp::kInsert;
    } else if (fields[3] == "D") {
      op = EdgeOp::kDelete;
    } else {
      throw ParseError(lineno, "op must be I or D, got '" + std::string(fields[3]) + "'");
    }
    const std::string src = node_label(fields[1], mode, lineno, "src");
    const std::string dst = node_label(fields[2], mode, lineno, "dst");
    events.push_back(EdgeEvent{dict.intern(src), dict.intern(dst), op, ts, 1.0});
  }
  return events;
}

std::vector<EdgeEvent> read_events_file(const std::string& path, IdMode mode,
                                        NodeDictionary& dict) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfig, "cannot open input file: " + path);
  return read_events(in, mode, dict);
}

namespace {

template <typename Label>
void write_impl(std::ostream& out, std::span<const EdgeEvent> events, Label&& label) {
  for (const EdgeEvent& ev : events) {
    out << ev.timestamp << '\t' << label(ev.u) << '\t' << label(ev.v) << '\t'
        << (ev.op == EdgeOp::kInsert ? 'I' : 'D') << '\n';
  }
}

}  // namespace

void write_events(std::ostream& out, std::span<const EdgeEvent> events,
                  const NodeDictionary& dict) {
  write_impl(out, events, [&](NodeId id) -> const std::string& { return dict.label(id); });
}

void write_events(std::ostream& out, std::span<const EdgeEvent> events) {
  write_impl(out, events, [](NodeId id) { return id; });
}

}  // namespace dynppr
