#include <gtest/gtest.h>

#include <string>

#include "mostow/error.hpp"
#include "mostow/io.hpp"

using namespace mostow;

namespace {

const char* kGood = R"({"schema_version": 1, "n": 2,
  "basis": [[0, 1, -1, 0], [1, 0, 0, -1], [0, 1, 1, 0]],
  "k_indices": [0], "p_indices": [1, 2], "name": "sl2"})";

Error error_of(const std::string& text) {
  try {
    parse_presentation(text);
  } catch (const Error& e) {
    return e;
  }
  ADD_FAILURE() << "no error for " << text;
  return Error(ErrorCode::ParseError, "");
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
  const auto pos = s.find(from);
  EXPECT_NE(pos, std::string::npos) << from;
  return s.replace(pos, from.size(), to);
}

}  // namespace

TEST(Parse, GoodDocument) {
  const PresentationDocument d = parse_presentation(kGood);
  EXPECT_EQ(d.n, 2);
  ASSERT_EQ(d.basis.size(), 3u);
  EXPECT_EQ(d.basis[0][2], -1.0);
  EXPECT_EQ(d.k_indices, std::vector<int>{0});
  EXPECT_EQ(*d.name, "sl2");
  const CartanSplit s = to_split(d);
  EXPECT_EQ(s.g.basis[0](1, 0), -1.0);
  EXPECT_EQ(s.p_idx, (std::vector<int>{1, 2}));
}

TEST(Parse, MalformedJsonReportsByte) {
  const Error e = error_of(R"({"n": 2,,})");
  EXPECT_EQ(e.code(), ErrorCode::ParseError);
  EXPECT_NE(std::string(e.what()).find("at byte 9"), std::string::npos) << e.what();
}

TEST(Parse, SchemaErrorsCarryPointers) {
  const std::vector<std::pair<std::string, std::string>> cases = {
      {replace(kGood, R"(, "p_indices": [1, 2])", ""), "/p_indices: required field is missing"},
      {replace(kGood, "[0, 1, 1, 0]", "[0, 1, 1]"), "/basis/2: expected n*n = 4 entries, got 3"},
      {replace(kGood, R"("name")", R"("title")"), "/title: unknown field"},
      {replace(kGood, R"("p_indices": [1, 2])", R"("p_indices": [1, 0])"), "/p_indices/1: index 0 listed twice"},
      {replace(kGood, R"("p_indices": [1, 2])", R"("p_indices": [1, 5])"), "/p_indices/1: index 5 outside [0,3)"},
      {replace(kGood, R"("p_indices": [1, 2])", R"("p_indices": [1])"), "/p_indices: basis element 2"},
      {replace(kGood, R"("schema_version": 1)", R"("schema_version": 2)"), "/schema_version: unsupported version 2"},
      {replace(kGood, R"("n": 2)", R"("n": 2.5)"), "/n: expected an integer"},
      {replace(kGood, R"("n": 2)", R"("n": 0)"), "/n: matrix size must be positive"},
      {replace(kGood, "[1, 0, 0, -1]", R"([1, 0, "0", -1])"), "/basis/1/2: expected a number"},
      {replace(kGood, R"("name": "sl2")", R"("name": 4)"), "/name: expected a string"},
      {"[1, 2]", ": document must be a JSON object"},
  };
  for (const auto& [text, message] : cases) {
    const Error e = error_of(text);
    EXPECT_EQ(e.code(), ErrorCode::SchemaError) << message;
    EXPECT_NE(std::string(e.what()).find(message), std::string::npos) << e.what();
  }
}

TEST(Emit, CanonicalAndRoundTrips) {
  for (const CatalogEntry& c : catalog()) {
    const std::string text = emit_presentation(c.document);
    EXPECT_EQ(text.back(), '\n');
    const PresentationDocument back = parse_presentation(text);
    EXPECT_EQ(back.basis, c.document.basis) << c.name;
    EXPECT_EQ(back.k_indices, c.document.k_indices);
    EXPECT_EQ(back.p_indices, c.document.p_indices);
    EXPECT_EQ(back.name, c.document.name);
    EXPECT_EQ(emit_presentation(back), text) << c.name;
  }
}

TEST(Emit, SortedKeysAndShortestDoubles) {
  PresentationDocument d = parse_presentation(kGood);
  d.basis[0][1] = 0.1;
  const std::string text = emit_presentation(d);
  const auto pos = [&](const char* key) { return text.find(std::string("\"") + key + "\""); };
  EXPECT_LT(pos("basis"), pos("k_indices"));
  EXPECT_LT(pos("k_indices"), pos("n"));
  EXPECT_LT(pos("n"), pos("name"));
  EXPECT_LT(pos("p_indices"), pos("schema_version"));
  EXPECT_NE(text.find("0.1,"), std::string::npos) << text;
  EXPECT_EQ(parse_presentation(text).basis[0][1], 0.1);
}

TEST(Emit, NameIsOptional) {
  PresentationDocument d = parse_presentation(kGood);
  d.name.reset();
  const std::string text = emit_presentation(d);
  EXPECT_EQ(text.find("name"), std::string::npos);
  EXPECT_FALSE(parse_presentation(text).name.has_value());
}

TEST(Catalog, EntriesAndLookup) {
  EXPECT_EQ(catalog().size(), 7u);
  int semisimple = 0;
  for (const CatalogEntry& c : catalog()) {
    semisimple += c.semisimple;
    EXPECT_EQ(find_catalog_entry(c.name), &c);
    EXPECT_EQ(*c.document.name, c.name);
  }
  EXPECT_EQ(semisimple, 6);
  EXPECT_EQ(find_catalog_entry("nope"), nullptr);
}

TEST(Split, FromSplitInvertsToSplit) {
  const CartanSplit s = to_split(find_catalog_entry("sl2-irreducible-in-sl3")->document);
  const PresentationDocument d = from_split(s, "x");
  EXPECT_EQ(d.basis, find_catalog_entry("sl2-irreducible-in-sl3")->document.basis);
  EXPECT_EQ(*d.name, "x");
}
