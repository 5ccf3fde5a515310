#include <doctest.h>

#include "cua/dsl.hpp"
#include "helpers.hpp"

using namespace cua;
using namespace cua::core;
using namespace cua::dsl;

TEST_CASE("parse: documented literals") {
  CHECK(parse_action("pyautogui.click(x=0.157, y=0.1229)") ==
        AgentAction(Click{0.157, 0.1229, MouseButton::left}));
  CHECK(parse_action("computer.terminate(status='success')") ==
        AgentAction(Terminate{TaskStatus::success}));
  CHECK(parse_action("pyautogui.moveTo(x=0.0, y=0.0)") ==
        AgentAction(MoveTo{0.0, 0.0}));
  CHECK(parse_action("pyautogui.hotkey('ctrl','shift','t')") ==
        AgentAction(Hotkey{{"ctrl", "shift", "t"}}));
}

TEST_CASE("parse: argument forms and synonyms") {
  CHECK(parse_action("click(0.25, 0.75)") ==
        AgentAction(Click{0.25, 0.75, MouseButton::left}));
  CHECK(parse_action("pyautogui.click(0.25, 0.75, 'right')") ==
        AgentAction(Click{0.25, 0.75, MouseButton::right}));
  CHECK(parse_action("pyautogui.rightClick(x=0.1, y=0.2)") ==
        AgentAction(Click{0.1, 0.2, MouseButton::right}));
  CHECK(parse_action("pyautogui.click(x=0.1, y=0.2, button='right')") ==
        AgentAction(Click{0.1, 0.2, MouseButton::right}));
  // click(middle) canonicalizes to middleClick
  CHECK(parse_action("pyautogui.click(x=0.1, y=0.2, button='middle')") ==
        AgentAction(MiddleClick{0.1, 0.2}));
  CHECK(parse_action("computer.triple_click(x=0.3, y=0.4)") ==
        AgentAction(TripleClick{0.3, 0.4, MouseButton::left}));
  CHECK(parse_action("pyautogui.hotkey('shift', 'control', 'T')") ==
        AgentAction(Hotkey{{"ctrl", "shift", "t"}}));
  CHECK(parse_action("pyautogui.press('Return')") == AgentAction(Press{"enter"}));
  CHECK(parse_action("pyautogui.press('down', presses=3)") ==
        AgentAction(Press{"down"}));
}

TEST_CASE("parse: scroll forms and sign conventions") {
  CHECK(parse_action("pyautogui.scroll(-5)") ==
        AgentAction(Scroll{0, -5, std::nullopt}));
  CHECK(parse_action("pyautogui.scroll(0, -5)") ==
        AgentAction(Scroll{0, -5, std::nullopt}));
  CHECK(parse_action("pyautogui.scroll(dy=7)") ==
        AgentAction(Scroll{0, 7, std::nullopt}));
  CHECK(parse_action("pyautogui.hscroll(3)") ==
        AgentAction(HScroll{3, 0, std::nullopt}));
  CHECK(parse_action("pyautogui.scroll(dy=-5, x=0.5, y=0.5)") ==
        AgentAction(Scroll{0, -5, Point{0.5, 0.5}}));
  CHECK_THROWS_AS(parse_action("pyautogui.scroll(0)"), CuaError);
  CHECK_THROWS_AS(parse_action("pyautogui.scroll(dy=1.5)"), CuaError);
}

TEST_CASE("parse: fenced input") {
  CHECK(parse_action("```python\npyautogui.click(x=0.5, y=0.5)\n```") ==
        AgentAction(Click{0.5, 0.5, MouseButton::left}));
  CHECK(parse_action("'''python\ncomputer.wait()'''") == AgentAction(Wait{}));
}

TEST_CASE("parse: pixel coordinates demand a resolution") {
  Resolution res{1000, 500};
  CHECK(parse_action("pyautogui.click(x=300, y=200)", res) ==
        AgentAction(Click{0.3, 0.4, MouseButton::left}));
  // 0 and 1 are normalized corners, not pixels
  CHECK(parse_action("pyautogui.click(x=0, y=1)") ==
        AgentAction(Click{0.0, 1.0, MouseButton::left}));
  try {
    parse_action("pyautogui.click(x=300, y=200)");
    FAIL("expected domain_error");
  } catch (const CuaError& e) {
    CHECK(e.code() == Err::domain_error);
  }
}

TEST_CASE("parse: error codes and byte offsets") {
  try {
    parse_action("pyautogui.frobnicate(x=0.5, y=0.5)");
    FAIL("expected unsupported_action");
  } catch (const CuaError& e) {
    CHECK(e.code() == Err::unsupported_action);
  }
  try {
    parse_action("robot.click(x=0.5, y=0.5)");
    FAIL("expected unsupported_action");
  } catch (const CuaError& e) {
    CHECK(e.code() == Err::unsupported_action);
  }
  try {
    parse_action("pyautogui.click(x=0.5, !)");
    FAIL("expected parse_error");
  } catch (const CuaError& e) {
    CHECK(e.code() == Err::parse_error);
    REQUIRE(e.offset().has_value());
    CHECK(*e.offset() == 23);  // the '!'
  }
  try {
    parse_action("pyautogui.click(x=1.5, y=0.5)");
    FAIL("expected domain_error");
  } catch (const CuaError& e) {
    CHECK(e.code() == Err::domain_error);
  }
  CHECK_THROWS_AS(parse_action("pyautogui.hotkey('ctrl')"), CuaError);
  CHECK_THROWS_AS(parse_action("pyautogui.write('')"), CuaError);
  CHECK_THROWS_AS(parse_action("pyautogui.click(x=0.5, y=0.5, turbo=1)"), CuaError);
}

TEST_CASE("render: canonical forms") {
  CHECK(render_action(Click{0.5, 0.5, MouseButton::left}) ==
        "pyautogui.click(x=0.5000, y=0.5000)");
  CHECK(render_action(Terminate{TaskStatus::failure}) ==
        "computer.terminate(status='failure')");
  CHECK(render_action(Click{0.1, 0.2, MouseButton::right}) ==
        "pyautogui.click(x=0.1000, y=0.2000, button='right')");
  CHECK(render_action(Hotkey{{"ctrl", "c"}}) == "pyautogui.hotkey('ctrl', 'c')");
  CHECK(render_action(Write{"it's a \\ test"}) ==
        "pyautogui.write('it\\'s a \\\\ test')");
  CHECK(render_action(Scroll{0, -5, std::nullopt}) == "pyautogui.scroll(dy=-5)");
  CHECK(render_action(Wait{}) == "computer.wait()");
}

// Independent table-driven oracle: build the surface text by direct string
// assembly per action kind and check the parser recovers the same value.
TEST_CASE("parse: table-driven oracle over the whole action space") {
  std::mt19937_64 rng(2024);
  auto coord = [&] { return test::rcoord(rng); };
  for (int trial = 0; trial < 3000; ++trial) {
    int kind = int(test::rint(rng, 0, 9));
    char buf[256];
    AgentAction expected;
    std::string text;
    switch (kind) {
      case 0: {
        double x = coord(), y = coord();
        bool right = test::rint(rng, 0, 1);
        std::snprintf(buf, sizeof buf, "pyautogui.click(x=%.4f, y=%.4f%s)", x, y,
                      right ? ", button='right'" : "");
        text = buf;
        expected = Click{x, y, right ? MouseButton::right : MouseButton::left};
        break;
      }
      case 1: {
        double x = coord(), y = coord();
        std::snprintf(buf, sizeof buf, "pyautogui.middleClick(%.4f, %.4f)", x, y);
        text = buf;
        expected = MiddleClick{x, y};
        break;
      }
      case 2: {
        double x = coord(), y = coord();
        std::snprintf(buf, sizeof buf, "pyautogui.doubleClick(x=%.4f, y=%.4f)", x, y);
        text = buf;
        expected = DoubleClick{x, y, MouseButton::left};
        break;
      }
      case 3: {
        double x = coord(), y = coord();
        std::snprintf(buf, sizeof buf, "computer.triple_click(x=%.4f, y=%.4f)", x, y);
        text = buf;
        expected = TripleClick{x, y, MouseButton::left};
        break;
      }
      case 4: {
        double x = coord(), y = coord();
        bool drag = test::rint(rng, 0, 1);
        std::snprintf(buf, sizeof buf, "pyautogui.%s(x=%.4f, y=%.4f)",
                      drag ? "dragTo" : "moveTo", x, y);
        text = buf;
        if (drag) expected = DragTo{x, y};
        else expected = MoveTo{x, y};
        break;
      }
      case 5: {
        int dy = int(test::rint(rng, 1, 9)) * (test::rint(rng, 0, 1) ? 1 : -1);
        std::snprintf(buf, sizeof buf, "pyautogui.scroll(%d)", dy);
        text = buf;
        expected = Scroll{0, dy, std::nullopt};
        break;
      }
      case 6: {
        std::string word;
        for (int i = 0, n = int(test::rint(rng, 1, 12)); i < n; ++i)
          word += char('a' + test::rint(rng, 0, 25));
        text = "pyautogui.write('" + word + "')";
        expected = Write{word};
        break;
      }
      case 7: {
        const char* keys[] = {"enter", "tab", "esc", "f5", "down"};
        std::string k = keys[test::rint(rng, 0, 4)];
        text = "pyautogui.press('" + k + "')";
        expected = Press{k};
        break;
      }
      case 8: {
        const char* mods[] = {"ctrl", "alt", "cmd"};
        std::string m = mods[test::rint(rng, 0, 2)];
        std::string k(1, char('a' + test::rint(rng, 0, 25)));
        text = "pyautogui.hotkey('" + m + "', '" + k + "')";
        expected = Hotkey{{m, k}};
        break;
      }
      default: {
        bool ok = test::rint(rng, 0, 1);
        text = std::string("computer.terminate(status='") +
               (ok ? "success" : "failure") + "')";
        expected = Terminate{ok ? TaskStatus::success : TaskStatus::failure};
        break;
      }
    }
    CAPTURE(text);
    CHECK(parse_action(text) == expected);
  }
}

TEST_CASE("round trip: parse(render(a)) == a") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 2000; ++i) {
    AgentAction a = test::random_action(rng);
    std::string rendered = render_action(a);
    CAPTURE(rendered);
    CHECK(parse_action(rendered) == a);
    CHECK(render_action(a) == rendered);  // byte-stable
  }
}

TEST_CASE("extract_response: sectioned response with fenced code") {
  std::string response =
      "# Step 5:\n"
      "## Thought:The search field still shows the stale query, so selecting "
      "it is the next productive move.\n\n"
      "## Action:Click on the search field to focus it.\n\n"
      "## Code:\n```python\npyautogui.click(x=0.157, y=0.1229)\n```\n";
  auto parsed = extract_response(response);
  CHECK(parsed.action == AgentAction(Click{0.157, 0.1229, MouseButton::left}));
  REQUIRE(parsed.sections.size() == 3);
  CHECK(parsed.sections[0].first == Section::thought);
  CHECK(parsed.sections[1].first == Section::action);
  CHECK(parsed.sections[2].first == Section::code);
  CHECK(parsed.sections[1].second == "Click on the search field to focus it.");
  CHECK(parsed.raw == response);
}

TEST_CASE("extract_response: quote-fenced code payload") {
  std::string response =
      "## Action:Copy the selection.\n"
      "## Code:'''python\npyautogui.hotkey('ctrl', 'c')'''";
  auto parsed = extract_response(response);
  CHECK(parsed.action == AgentAction(Hotkey{{"ctrl", "c"}}));
}

TEST_CASE("extract_response: bare action, empty sections") {
  auto parsed = extract_response("computer.terminate(status='success')");
  CHECK(parsed.action == AgentAction(Terminate{TaskStatus::success}));
  CHECK(parsed.sections.empty());
}

TEST_CASE("extract_response: last expression wins") {
  std::string response =
      "## Code:\n```python\npyautogui.moveTo(x=0.2, y=0.2)\n"
      "pyautogui.click(x=0.2, y=0.2)\n```\n";
  auto parsed = extract_response(response);
  CHECK(parsed.action == AgentAction(Click{0.2, 0.2, MouseButton::left}));
}

TEST_CASE("extract_response: L3 sections all captured") {
  std::string response =
      "## Observation:A settings dialog fills the screen.\n"
      "## Thought:The toggle must be enabled before saving.\n"
      "## Action:Click the toggle.\n"
      "## Code:\n```python\npyautogui.click(x=0.4, y=0.6)\n```\n";
  auto parsed = extract_response(response);
  REQUIRE(parsed.sections.size() == 4);
  CHECK(parsed.sections[0].first == Section::observation);
  CHECK(parsed.sections[3].first == Section::code);
}

TEST_CASE("extract_response: no parsable action raises no_action") {
  try {
    extract_response("## Thought:Nothing to do here.\n## Code:\n```\nprint('hello')\n```");
    FAIL("expected no_action");
  } catch (const CuaError& e) {
    CHECK(e.code() == Err::no_action);
  }
  CHECK_THROWS_AS(extract_response(""), CuaError);
}

TEST_CASE("extract_response: pixel coordinates honor the task resolution") {
  Resolution res{1920, 1080};
  auto parsed = extract_response(
      "## Code:\n```python\npyautogui.click(x=960, y=540)\n```", res);
  CHECK(parsed.action == AgentAction(Click{0.5, 0.5, MouseButton::left}));
}
