#include <doctest.h>

#include "lexv/legal_parser.hpp"
#include "support.hpp"

using namespace lexv;

namespace {

std::string parse_to_text(const std::string& fixture, const char* lang) {
  auto m = extract_articles(test::read_text(test::fixture(fixture)), default_patterns(lang));
  return m.to_json().dump(2) + "\n";
}

}  // namespace

TEST_CASE("English golden") {
  CHECK(parse_to_text("parser/en_insurance.txt", "en") == test::read_text(test::fixture("parser/en_insurance.golden.json")));
  auto m = extract_articles(test::read_text(test::fixture("parser/en_insurance.txt")), default_patterns("en"));
  CHECK(m.discarded_lines == 1);
  CHECK(m.heading_lines == 2);
  CHECK(m.order == std::vector<std::string>{"143-4", "143-6"});
}

TEST_CASE("Chinese golden") {
  CHECK(parse_to_text("parser/zh_insurance.txt", "zh") == test::read_text(test::fixture("parser/zh_insurance.golden.json")));
  auto m = extract_articles(test::read_text(test::fixture("parser/zh_insurance.txt")), default_patterns("zh"));
  CHECK(m.discarded_lines == 1);
  CHECK(m.heading_lines == 1);
  CHECK(m.at("143-6").title == "保險業資本等級之措施");
}

TEST_CASE("numeral normalization table") {
  auto table = json::parse(test::read_text(test::fixture("parser/zh_numerals.json")));
  REQUIRE(table.size() >= 10);
  for (const auto& [in, out] : table.items()) {
    CAPTURE(in);
    CHECK(normalize_numeral(in) == out.get<std::string>());
  }
}

TEST_CASE("line normalization") {
  CHECK(normalize_line("  a \t b  ") == "a b");
  CHECK(normalize_line("　保險　　法　") == "保險 法");
  CHECK(normalize_line("") == "");
}

TEST_CASE("repeated header continues the same article") {
  auto m = extract_articles("Article 5 Scope\nfirst part.\nArticle 5\nsecond part.\n", default_patterns("en"));
  REQUIRE(m.size() == 1);
  CHECK(m.at("5").content == "first part. second part.");
  CHECK(m.at("5").title == "Scope");
}

TEST_CASE("text without articles") {
  auto m = extract_articles("just prose\nmore prose\n", default_patterns("en"));
  CHECK(m.empty());
  CHECK(m.discarded_lines == 2);
}

TEST_CASE("custom patterns") {
  auto p = patterns_from_json(json::parse(R"({"article": "^Sec\\.\\s+(\\d+)()(?:\\s+(.*))?$", "headings": []})"),
                              default_patterns("en"));
  auto m = extract_articles("Sec. 9 Definitions\nTerms used here.\nChapter 2 stays text\n", p);
  REQUIRE(m.size() == 1);
  CHECK(m.at("9").content == "Terms used here. Chapter 2 stays text");
  CHECK_THROWS_AS(default_patterns("fr"), Error);
}

TEST_CASE("render then extract is the identity") {
  for (const char* lang : {"en", "zh"}) {
    const auto p = default_patterns(lang);
    const std::string src = lang == std::string("en") ? "parser/en_insurance.txt" : "parser/zh_insurance.txt";
    auto m = extract_articles(test::read_text(test::fixture(src)), p);
    auto again = extract_articles(render_articles(m, p), p);
    CHECK(again.order == m.order);
    CHECK(again.articles == m.articles);
    CHECK(ArticleMap::from_json(m.to_json()).articles == m.articles);
  }
}

TEST_CASE("fuzzed documents lose and invent nothing") {
  for (std::uint64_t seed = 1; seed <= 400; ++seed) {
    const bool zh = seed % 2 == 0;
    auto d = test::fuzz_document(seed, zh);
    CAPTURE(seed);
    CAPTURE(d.text);
    const auto p = default_patterns(zh ? Language::Zh : Language::En);
    auto m = extract_articles(d.text, p);
    REQUIRE(m.order == d.keys);
    CHECK(test::article_body(m) == d.body);
    for (std::size_t i = 0; i < d.keys.size(); ++i) CHECK(m.at(d.keys[i]).title == d.titles[i]);
    auto again = extract_articles(render_articles(m, p), p);
    CHECK(again.articles == m.articles);
  }
}
