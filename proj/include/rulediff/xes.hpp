#pragma once

#include <expat.h>

#include <cstring>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "rulediff/errors.hpp"
#include "rulediff/event_log.hpp"
#include "rulediff/io_util.hpp"

namespace rulediff {

// One trace as read from the file: its event names in document order plus
// the trace-level scalar attributes (kept as text). When event-attribute
// capture is requested, the first value seen for each key across the trace's
// events is kept as well; some public logs store case attributes on their
// first event rather than on the trace.
struct RawTrace {
  std::vector<std::string> events;
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<std::pair<std::string, std::string>> event_attributes;
};

namespace detail {

inline bool is_scalar_xes_element(const char* name) {
  return std::strcmp(name, "string") == 0 || std::strcmp(name, "int") == 0 ||
         std::strcmp(name, "date") == 0 || std::strcmp(name, "float") == 0 ||
         std::strcmp(name, "boolean") == 0 || std::strcmp(name, "id") == 0;
}

struct XesParseState {
  XML_Parser parser = nullptr;
  const std::string* origin = nullptr;
  const std::function<void(RawTrace&&)>* sink = nullptr;

  int depth = 0;
  int trace_depth = -1;
  int event_depth = -1;
  std::size_t trace_index = 0;
  bool event_named = false;
  bool capture_event_attributes = false;
  RawTrace current;
  std::string current_event_name;
  std::string error;  // deferred; expat C callbacks must not throw

  void fail(std::string message) {
    error = std::move(message);
    XML_StopParser(parser, XML_FALSE);
  }
};

inline const char* attr_value(const char** atts, const char* key) {
  for (int i = 0; atts[i] != nullptr; i += 2)
    if (std::strcmp(atts[i], key) == 0) return atts[i + 1];
  return nullptr;
}

inline void xes_start_element(void* ud, const char* name, const char** atts) {
  auto* st = static_cast<XesParseState*>(ud);
  ++st->depth;
  if (!st->error.empty()) return;
  if (std::strcmp(name, "trace") == 0 && st->trace_depth < 0) {
    st->trace_depth = st->depth;
    st->current = RawTrace{};
  } else if (std::strcmp(name, "event") == 0 && st->trace_depth > 0 && st->event_depth < 0) {
    st->event_depth = st->depth;
    st->event_named = false;
  } else if (is_scalar_xes_element(name)) {
    const char* key = attr_value(atts, "key");
    const char* value = attr_value(atts, "value");
    if (key == nullptr || value == nullptr) return;
    if (st->event_depth > 0 && st->depth == st->event_depth + 1) {
      if (std::strcmp(key, "concept:name") == 0) {
        st->current_event_name = value;
        st->event_named = true;
      } else if (st->capture_event_attributes) {
        bool seen = false;
        for (const auto& [k, v] : st->current.event_attributes)
          if (k == key) {
            seen = true;
            break;
          }
        if (!seen) st->current.event_attributes.emplace_back(key, value);
      }
    } else if (st->trace_depth > 0 && st->event_depth < 0 && st->depth == st->trace_depth + 1) {
      st->current.attributes.emplace_back(key, value);
    }
  }
}

inline void xes_end_element(void* ud, const char* name) {
  auto* st = static_cast<XesParseState*>(ud);
  if (st->error.empty()) {
    if (std::strcmp(name, "event") == 0 && st->depth == st->event_depth) {
      if (!st->event_named) {
        st->fail("event missing concept:name in trace " + std::to_string(st->trace_index) +
                 " of '" + *st->origin + "'");
      } else {
        st->current.events.push_back(std::move(st->current_event_name));
      }
      st->event_depth = -1;
    } else if (std::strcmp(name, "trace") == 0 && st->depth == st->trace_depth) {
      if (st->current.events.empty()) {
        st->fail("empty trace at index " + std::to_string(st->trace_index) + " in '" +
                 *st->origin + "'");
      } else {
        (*st->sink)(std::move(st->current));
        st->current = RawTrace{};
        ++st->trace_index;
      }
      st->trace_depth = -1;
    }
  }
  --st->depth;
}

}  // namespace detail

// Streaming reader for the XES subset this tool consumes: <trace> children
// of <log>, <event> children of traces, and each event's concept:name.
// Trace-level scalar attributes are surfaced so callers can split a log by
// a case attribute. Memory stays bounded by one trace at a time.
inline void read_xes_stream(const std::string& path,
                            const std::function<void(RawTrace&&)>& on_trace,
                            bool capture_event_attributes = false) {
  const std::string xml = read_input_file(path);

  detail::XesParseState state;
  state.origin = &path;
  state.sink = &on_trace;
  state.capture_event_attributes = capture_event_attributes;

  XML_Parser parser = XML_ParserCreate(nullptr);
  if (parser == nullptr) throw ParseError("cannot create XML parser");
  state.parser = parser;
  XML_SetUserData(parser, &state);
  XML_SetElementHandler(parser, detail::xes_start_element, detail::xes_end_element);

  const XML_Status status =
      XML_Parse(parser, xml.data(), static_cast<int>(xml.size()), /*isFinal=*/XML_TRUE);
  std::string message = state.error;
  if (message.empty() && status == XML_STATUS_ERROR) {
    message = "malformed XML in '" + path + "' at line " +
              std::to_string(XML_GetCurrentLineNumber(parser)) + ": " +
              XML_ErrorString(XML_GetErrorCode(parser));
  }
  XML_ParserFree(parser);
  if (!message.empty()) throw ParseError(message);
}

inline std::vector<RawTrace> read_xes_traces(const std::string& path,
                                             bool capture_event_attributes = false) {
  std::vector<RawTrace> out;
  read_xes_stream(path, [&](RawTrace&& t) { out.push_back(std::move(t)); },
                  capture_event_attributes);
  return out;
}

inline EventLog parse_xes(const std::string& path) {
  EventLog log;
  read_xes_stream(path, [&](RawTrace&& t) { log.add_trace(t.events); });
  return log;
}

}  // namespace rulediff
