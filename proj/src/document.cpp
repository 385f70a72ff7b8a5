#include "adaptchunk/document.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "adaptchunk/error.hpp"

namespace adaptchunk {

using nlohmann::json;

namespace {

constexpr std::string_view kPageBreakMarker = "<!-- PageBreak -->";

std::string span_str(std::size_t a, std::size_t b) {
  return "[" + std::to_string(a) + "," + std::to_string(b) + ")";
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t as_offset(const json& v, std::string_view what) {
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw InputError(std::string(what) + ": expected a non-negative integer offset, got " + v.dump());
  }
  return v.get<std::size_t>();
}

}  // namespace

std::string_view to_string(BlockKind kind) {
  switch (kind) {
    case BlockKind::kParagraph: return "paragraph";
    case BlockKind::kTable: return "table";
    case BlockKind::kFigure: return "figure";
    case BlockKind::kTitle: return "title";
    case BlockKind::kList: return "list";
    case BlockKind::kHeaderFooter: return "header_footer";
    case BlockKind::kOther: return "other";
  }
  return "other";
}

BlockKind parse_block_kind(std::string_view name) {
  for (auto k : {BlockKind::kParagraph, BlockKind::kTable, BlockKind::kFigure, BlockKind::kTitle,
                 BlockKind::kList, BlockKind::kHeaderFooter}) {
    if (to_string(k) == name) return k;
  }
  return BlockKind::kOther;
}

void check_document(const Document& doc) {
  const std::size_t L = doc.length();
  std::size_t expected = 0;
  for (const auto& b : doc.blocks) {
    if (b.end > L) throw InputError("block " + span_str(b.start, b.end) + ": span exceeds document length " + std::to_string(L));
    if (b.start >= b.end) throw InputError("block " + span_str(b.start, b.end) + ": empty or inverted span");
    if (b.start != expected) {
      throw InputError("block " + span_str(b.start, b.end) + ": blocks do not tile the document (expected start " +
                       std::to_string(expected) + ")");
    }
    expected = b.end;
  }
  if (expected != L) {
    throw InputError("blocks do not tile the document: coverage ends at " + std::to_string(expected) +
                     ", document length is " + std::to_string(L));
  }
  for (std::size_t p : doc.page_breaks) {
    if (p >= L) throw InputError("page break " + std::to_string(p) + ": span exceeds document length");
  }
  if (!std::is_sorted(doc.page_breaks.begin(), doc.page_breaks.end())) throw InputError("page breaks are not sorted");
  std::size_t prev_end = 0;
  for (const auto& s : doc.sentences) {
    if (s.end > L) throw InputError("sentence " + span_str(s.start, s.end) + ": span exceeds document length");
    if (s.start >= s.end) throw InputError("sentence " + span_str(s.start, s.end) + ": empty or inverted span");
    if (s.start < prev_end) throw InputError("sentence " + span_str(s.start, s.end) + ": overlaps or is out of order");
    prev_end = s.end;
  }
  for (const auto& p : doc.coref_pairs) {
    if (p.pronoun_end > L) {
      throw InputError("coref pair " + span_str(p.entity_start, p.pronoun_end) + ": span exceeds document length");
    }
    if (p.entity_start >= p.pronoun_end) {
      throw InputError("coref pair " + span_str(p.entity_start, p.pronoun_end) + ": entity must start before pronoun end");
    }
  }
}

std::vector<std::size_t> detect_page_breaks(const Utf8Text& text) {
  std::vector<std::size_t> out;
  const std::string& s = text.str();
  for (std::size_t pos = s.find(kPageBreakMarker); pos != std::string::npos;
       pos = s.find(kPageBreakMarker, pos + kPageBreakMarker.size())) {
    out.push_back(text.char_offset(pos));
  }
  return out;
}

Document make_document(std::string id, std::string markdown, std::string_view sidecar_json) {
  Document doc;
  doc.id = std::move(id);
  doc.text = Utf8Text(std::move(markdown));

  json side;
  try {
    side = json::parse(sidecar_json);
  } catch (const json::parse_error& e) {
    throw InputError("malformed sidecar JSON: " + std::string(e.what()));
  }
  if (!side.is_object()) throw InputError("malformed sidecar JSON: top level must be an object");

  try {
    if (!side.contains("blocks") || !side["blocks"].is_array()) throw InputError("sidecar is missing the blocks array");
    for (const auto& b : side["blocks"]) {
      if (!b.is_array() || b.size() < 2) throw InputError("block entry must be [start, end, kind]: " + b.dump());
      BlockSpan span{as_offset(b[0], "block start"), as_offset(b[1], "block end"), BlockKind::kParagraph};
      if (b.size() > 2) span.kind = parse_block_kind(b[2].get<std::string>());
      doc.blocks.push_back(span);
    }

    if (side.contains("page_breaks")) {
      for (const auto& p : side["page_breaks"]) doc.page_breaks.push_back(as_offset(p, "page break"));
      std::sort(doc.page_breaks.begin(), doc.page_breaks.end());
      doc.page_breaks.erase(std::unique(doc.page_breaks.begin(), doc.page_breaks.end()), doc.page_breaks.end());
    } else {
      doc.page_breaks = detect_page_breaks(doc.text);
    }

    if (side.contains("sentences")) {
      for (const auto& s : side["sentences"]) {
        if (!s.is_array() || s.size() != 2) throw InputError("sentence entry must be [start, end]: " + s.dump());
        doc.sentences.push_back({as_offset(s[0], "sentence start"), as_offset(s[1], "sentence end")});
      }
    } else {
      doc.sentences_missing = true;
    }

    if (side.contains("coref_pairs")) {
      for (const auto& p : side["coref_pairs"]) {
        doc.coref_pairs.push_back({as_offset(p.at("entity_start"), "entity_start"),
                                   as_offset(p.at("pronoun_end"), "pronoun_end"),
                                   p.value("entity_text", std::string{}), p.value("pronoun_text", std::string{})});
      }
    } else {
      doc.coref_missing = true;
    }

    doc.language = side.value("language", std::string("en"));
  } catch (const json::exception& e) {
    throw InputError("malformed sidecar JSON: " + std::string(e.what()));
  }

  check_document(doc);
  return doc;
}

Document load_document(const std::filesystem::path& markdown_path, const std::filesystem::path& sidecar_path) {
  std::string text = read_file(markdown_path);
  std::string side = read_file(sidecar_path);
  try {
    return make_document(markdown_path.stem().string(), std::move(text), side);
  } catch (const InputError& e) {
    throw InputError(markdown_path.filename().string() + ": " + e.what());
  }
}

std::string sidecar_to_json(const Document& doc) {
  json side;
  side["blocks"] = json::array();
  for (const auto& b : doc.blocks) side["blocks"].push_back({b.start, b.end, std::string(to_string(b.kind))});
  side["page_breaks"] = doc.page_breaks;
  if (!doc.sentences_missing) {
    side["sentences"] = json::array();
    for (const auto& s : doc.sentences) side["sentences"].push_back({s.start, s.end});
  }
  if (!doc.coref_missing) {
    side["coref_pairs"] = json::array();
    for (const auto& p : doc.coref_pairs) {
      side["coref_pairs"].push_back({{"entity_start", p.entity_start},
                                     {"pronoun_end", p.pronoun_end},
                                     {"entity_text", p.entity_text},
                                     {"pronoun_text", p.pronoun_text}});
    }
  }
  side["language"] = doc.language;
  return side.dump();
}

std::vector<std::size_t> interior_boundaries(const Chunking& chunking) {
  const auto& c = chunking.chunks;
  std::set<std::size_t> cuts;
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (k > 0) cuts.insert(c[k].start);
    if (k + 1 < c.size()) cuts.insert(c[k].end);
  }
  return {cuts.begin(), cuts.end()};
}

std::vector<Violation> validate_chunking(const Document& doc, const Chunking& chunking) {
  using K = Violation::Kind;
  std::vector<Violation> out;
  const std::size_t L = doc.length();
  const auto& c = chunking.chunks;
  if (!chunking.doc_id.empty() && chunking.doc_id != doc.id) {
    out.push_back({K::kDocIdMismatch, 0, "chunking doc_id '" + chunking.doc_id + "' does not match document '" + doc.id + "'"});
  }
  if (c.empty()) {
    if (L > 0) out.push_back({K::kNoChunks, 0, "no chunks for a non-empty document"});
    return out;
  }
  if (c.front().start != 0) out.push_back({K::kBadStart, c.front().start, "first chunk does not start at 0"});
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (c[k].start >= c[k].end) {
      out.push_back({K::kEmptyChunk, c[k].start, "chunk " + std::to_string(k) + " is empty or inverted"});
    }
    if (c[k].end > L) {
      out.push_back({K::kOutOfRange, c[k].end, "chunk " + std::to_string(k) + " ends past the document length"});
    }
    if (k + 1 < c.size()) {
      if (c[k + 1].start > c[k].end) {
        out.push_back({K::kGap, c[k].end, "gap between chunk " + std::to_string(k) + " and " + std::to_string(k + 1)});
      } else if (c[k + 1].start < c[k].end) {
        out.push_back({K::kOverlap, c[k + 1].start,
                       "chunk " + std::to_string(k + 1) + " overlaps chunk " + std::to_string(k)});
      }
    }
  }
  if (c.back().end != L) out.push_back({K::kBadEnd, c.back().end, "last chunk does not end at the document length"});
  return out;
}

Chunking chunking_from_cuts(const Document& doc, const std::vector<std::size_t>& cuts, std::string method) {
  Chunking out{doc.id, std::move(method), "", {}};
  const std::size_t L = doc.length();
  if (L == 0) return out;
  std::size_t prev = 0;
  for (std::size_t cut : cuts) {
    if (cut <= prev || cut >= L) continue;
    out.chunks.push_back({prev, cut, 0, std::nullopt});
    prev = cut;
  }
  out.chunks.push_back({prev, L, 0, std::nullopt});
  return out;
}

std::string chunking_to_jsonl(const Document& doc, const Chunking& chunking) {
  std::string out;
  for (std::size_t k = 0; k < chunking.chunks.size(); ++k) {
    const Chunk& c = chunking.chunks[k];
    nlohmann::ordered_json row = {{"doc_id", chunking.doc_id},
                {"index", k},
                {"start", c.start},
                {"end", c.end},
                {"token_count", c.token_count},
                {"text", std::string(doc.slice(c.start, c.end))}};
    if (c.overlap_start && *c.overlap_start < c.start) row["overlap_hint"] = {*c.overlap_start, c.start};
    out += row.dump();
    out += '\n';
  }
  return out;
}

std::vector<Chunking> chunkings_from_jsonl(std::string_view jsonl, std::string_view method) {
  std::vector<Chunking> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < jsonl.size()) {
    std::size_t nl = jsonl.find('\n', pos);
    if (nl == std::string_view::npos) nl = jsonl.size();
    std::string_view line = jsonl.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      json row = json::parse(line);
      const std::string doc_id = row.at("doc_id").get<std::string>();
      if (out.empty() || out.back().doc_id != doc_id) {
        auto it = std::find_if(out.begin(), out.end(), [&](const Chunking& c) { return c.doc_id == doc_id; });
        if (it != out.end()) throw InputError("chunks of document '" + doc_id + "' are not contiguous in the file");
        out.push_back({doc_id, std::string(method), "", {}});
      }
      Chunk c{row.at("start").get<std::size_t>(), row.at("end").get<std::size_t>(),
              row.value("token_count", std::size_t{0}), std::nullopt};
      if (row.contains("overlap_hint")) c.overlap_start = row["overlap_hint"].at(0).get<std::size_t>();
      out.back().chunks.push_back(c);
    } catch (const json::exception& e) {
      throw InputError("chunk JSONL line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace adaptchunk
