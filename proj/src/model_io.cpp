#include "gsmp/model_io.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace gsmp {

namespace {

bool valid_name(std::string_view s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
  for (char c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-' && c != '.')
      return false;
  }
  return true;
}

std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_real(std::string_view tok, int line) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size())
    throw ParseError(line, "expected a number, got '" + std::string(tok) + "'");
  return v;
}

long long parse_bound(std::string_view tok, int line, bool& is_inf) {
  if (tok == "inf") {
    is_inf = true;
    return 0;
  }
  is_inf = false;
  long long v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size())
    throw ParseError(line, "expected an integer bound or 'inf', got '" + std::string(tok) + "'");
  return v;
}

std::string format_real(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

enum class Section { none, states, events, schedule, succ, init };

}  // namespace

ModelParts parse_model(std::string_view text) {
  ModelParts parts;
  Section section = Section::none;
  int line_no = 0;
  std::size_t pos = 0;

  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view raw =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    std::string_view line = trim(raw);
    if (line.empty()) continue;

    bool at_margin = !std::isspace(static_cast<unsigned char>(raw.front()));
    if (at_margin && line.find(':') != std::string_view::npos) {
      auto colon = line.find(':');
      std::string_view head = trim(line.substr(0, colon));
      std::string_view rest = trim(line.substr(colon + 1));
      Section next = Section::none;
      if (head == "states") next = Section::states;
      else if (head == "events") next = Section::events;
      else if (head == "schedule") next = Section::schedule;
      else if (head == "succ") next = Section::succ;
      else if (head == "init") next = Section::init;
      if (next != Section::none) {
        section = next;
        if (rest.empty()) continue;
        if (section != Section::states)
          throw ParseError(line_no, "section '" + std::string(head) + "' takes no inline content");
        line = rest;
      } else if (section != Section::schedule) {
        throw ParseError(line_no, "unknown section '" + std::string(head) + "'");
      }
    }

    switch (section) {
      case Section::none:
        throw ParseError(line_no, "content before any section header");
      case Section::states: {
        for (auto& tok : split_ws(line)) {
          if (!valid_name(tok)) throw ParseError(line_no, "invalid state name '" + tok + "'");
          parts.states.push_back(std::move(tok));
        }
        break;
      }
      case Section::events: {
        auto toks = split_ws(line);
        if (toks.empty()) break;
        EventSpec ev;
        ev.name = toks[0];
        if (!valid_name(ev.name)) throw ParseError(line_no, "invalid event name '" + ev.name + "'");
        bool saw_kind = false, saw_lower = false, saw_upper = false, saw_rate = false;
        bool upper_inf = false;
        long long lower = 0, upper = 0;
        double rate = 0.0;
        for (std::size_t i = 1; i < toks.size(); ++i) {
          auto eq = toks[i].find('=');
          if (eq == std::string::npos)
            throw ParseError(line_no, "expected key=value, got '" + toks[i] + "'");
          std::string key = toks[i].substr(0, eq);
          std::string val = toks[i].substr(eq + 1);
          if (key == "kind") {
            saw_kind = true;
            if (val == "fixed") ev.law.kind = DelayKind::fixed;
            else if (val == "uniform") ev.law.kind = DelayKind::uniform;
            else if (val == "shifted-exponential") ev.law.kind = DelayKind::shifted_exponential;
            else throw ParseError(line_no, "unknown delay kind '" + val + "'");
          } else if (key == "lower") {
            saw_lower = true;
            bool inf = false;
            lower = parse_bound(val, line_no, inf);
            if (inf) throw ParseError(line_no, "lower bound cannot be 'inf'");
          } else if (key == "upper") {
            saw_upper = true;
            upper = parse_bound(val, line_no, upper_inf);
          } else if (key == "rate") {
            saw_rate = true;
            rate = parse_real(val, line_no);
          } else {
            throw ParseError(line_no, "unknown event key '" + key + "'");
          }
        }
        if (!saw_kind) throw ParseError(line_no, "event '" + ev.name + "' is missing kind=");
        if (!saw_lower) throw ParseError(line_no, "event '" + ev.name + "' is missing lower=");
        ev.law.lower = lower;
        switch (ev.law.kind) {
          case DelayKind::fixed:
          case DelayKind::uniform:
            if (!saw_upper || upper_inf)
              throw ParseError(line_no, "event '" + ev.name + "' needs a finite upper=");
            if (saw_rate) throw ParseError(line_no, "rate= is only valid for shifted-exponential");
            ev.law.upper = upper;
            break;
          case DelayKind::shifted_exponential:
            if (saw_upper && !upper_inf)
              throw ParseError(line_no, "shifted-exponential events take upper=inf");
            if (!saw_rate) throw ParseError(line_no, "event '" + ev.name + "' is missing rate=");
            ev.law.upper = std::nullopt;
            ev.law.rate = rate;
            break;
        }
        parts.events.push_back(std::move(ev));
        break;
      }
      case Section::schedule: {
        auto colon = line.find(':');
        if (colon == std::string_view::npos)
          throw ParseError(line_no, "expected '<state>: <events...>'");
        std::string state(trim(line.substr(0, colon)));
        if (!valid_name(state)) throw ParseError(line_no, "invalid state name '" + state + "'");
        auto events = split_ws(line.substr(colon + 1));
        parts.schedule.emplace_back(std::move(state), std::move(events));
        break;
      }
      case Section::succ: {
        auto lb = line.find('[');
        auto rb = line.find(']');
        auto arrow = line.find("->");
        if (lb == std::string_view::npos || rb == std::string_view::npos ||
            arrow == std::string_view::npos || rb < lb || arrow < rb)
          throw ParseError(line_no, "expected '<state> [<events>] -> <state> <weight>, ...'");
        ModelParts::SuccEntry entry;
        entry.state = std::string(trim(line.substr(0, lb)));
        if (!valid_name(entry.state))
          throw ParseError(line_no, "invalid state name '" + entry.state + "'");
        std::string inside(line.substr(lb + 1, rb - lb - 1));
        for (auto& c : inside)
          if (c == ',') c = ' ';
        entry.events = split_ws(inside);
        if (entry.events.empty()) throw ParseError(line_no, "empty occurring event set");
        std::string rhs(line.substr(arrow + 2));
        std::stringstream targets(rhs);
        std::string chunk;
        while (std::getline(targets, chunk, ',')) {
          auto toks = split_ws(chunk);
          if (toks.size() != 2)
            throw ParseError(line_no, "expected '<state> <weight>' in successor list");
          entry.targets.emplace_back(toks[0], parse_real(toks[1], line_no));
        }
        if (entry.targets.empty()) throw ParseError(line_no, "successor row has no targets");
        parts.succ.push_back(std::move(entry));
        break;
      }
      case Section::init: {
        auto toks = split_ws(line);
        if (toks.size() != 2) throw ParseError(line_no, "expected '<state> <weight>'");
        parts.init.emplace_back(toks[0], parse_real(toks[1], line_no));
        break;
      }
    }
  }
  return parts;
}

ModelParts parse_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open model file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str());
}

std::string serialize_model(const ModelParts& parts) {
  std::ostringstream out;
  out << "states:";
  for (const auto& s : parts.states) out << " " << s;
  out << "\n\nevents:\n";
  for (const auto& e : parts.events) {
    out << "  " << e.name << " kind=" << delay_kind_name(e.law.kind) << " lower=" << e.law.lower;
    if (e.law.upper) out << " upper=" << *e.law.upper;
    else out << " upper=inf";
    if (e.law.kind == DelayKind::shifted_exponential) out << " rate=" << format_real(e.law.rate);
    out << "\n";
  }
  out << "\nschedule:\n";
  for (const auto& [state, events] : parts.schedule) {
    out << "  " << state << ":";
    for (const auto& e : events) out << " " << e;
    out << "\n";
  }
  out << "\nsucc:\n";
  for (const auto& row : parts.succ) {
    out << "  " << row.state << " [";
    for (std::size_t i = 0; i < row.events.size(); ++i) {
      if (i) out << ",";
      out << row.events[i];
    }
    out << "] ->";
    for (std::size_t i = 0; i < row.targets.size(); ++i) {
      if (i) out << ",";
      out << " " << row.targets[i].first << " " << format_real(row.targets[i].second);
    }
    out << "\n";
  }
  out << "\ninit:\n";
  for (const auto& [state, w] : parts.init) out << "  " << state << " " << format_real(w) << "\n";
  return out.str();
}

}  // namespace gsmp
