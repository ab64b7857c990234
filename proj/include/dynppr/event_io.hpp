#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dynppr/errors.hpp"
#include "dynppr/graph_store.hpp"

namespace dynppr {

// Maps external node labels to dense ids in order of first appearance.
class NodeDictionary {
 public:
  NodeId intern(std::string_view label);
  std::optional<NodeId> find(std::string_view label) const;
  const std::string& label(NodeId id) const { return labels_.at(id); }
  std::size_t size() const noexcept { return labels_.size(); }

 private:
  std::unordered_map<std::string, NodeId> ids_;
  std::vector<std::string> labels_;
};

enum class IdMode {
  kInteger,  // labels must be non-negative decimal integers
  kString,   // any non-empty label without TAB
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::string reason)
      : Error(ErrorCode::kParse, "line " + std::to_string(line) + ": " + reason),
        line_(line),
        reason_(std::move(reason)) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::size_t line_;
  std::string reason_;
};

// Event file: UTF-8 text, one event per line,
//   timestamp<TAB>src<TAB>dst<TAB>op      op in {I, D}
// '#'-prefixed lines and empty lines are skipped; timestamps must be
// non-decreasing. Throws ParseError on the first malformed line.
std::vector<EdgeEvent> read_events(std::istream& in, IdMode mode, NodeDictionary& dict);
std::vector<EdgeEvent> read_events_file(const std::string& path, IdMode mode,
                                        NodeDictionary& dict);

void write_events(std::ostream& out, std::span<const EdgeEvent> events,
                  const NodeDictionary& dict);
// Writes ids as their decimal values, without a dictionary.
void write_events(std::ostream& out, std::span<const EdgeEvent> events);

}  // namespace dynppr
