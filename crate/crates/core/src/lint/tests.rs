use super::*;
use crate::router::{route_all, RouterConfig};
use crate::scene::{BlockStyle, Color, ConnectorStyle, ContainerStyle, ElementId, TextSpec};

const EXAMPLE: &str = include_str!("../../tests/fixtures/issue_list.txt");

fn r(x: f64, y: f64, w: f64, h: f64) -> Rect {
    Rect::from_inches(x, y, w, h)
}

fn block(s: &mut Scene, rect: Rect, text: &str) -> ElementId {
    s.add_block(rect, text, BlockStyle::default()).unwrap()
}

fn clean() -> Scene {
    let mut s = Scene::default();
    let a = block(&mut s, r(1.0, 1.0, 1.5, 0.75), "Encoder");
    let b = block(&mut s, r(4.0, 1.0, 1.5, 0.75), "Decoder");
    let c = block(&mut s, r(4.0, 3.0, 1.5, 0.75), "Head");
    s.add_connector(&a, &b, ConnectorKind::Elbow, ConnectorStyle::default()).unwrap();
    s.add_connector(&b, &c, ConnectorKind::Straight, ConnectorStyle::default()).unwrap();
    route_all(&s, &RouterConfig::default())
}

fn categories(issues: &[Issue]) -> Vec<Category> {
    issues.iter().map(|i| i.category).collect()
}

#[test]
fn clean_scene_is_clean() {
    let s = clean();
    assert!(lint_boundaries(&s).is_empty());
    assert!(lint_connectors(&s).is_empty());
    assert!(lint_text(&s).is_empty());
    assert!(lint_alignment(&s).is_empty());
    assert!(run_lints(&s).is_empty());
    assert!(run_lints(&Scene::default()).is_empty());
}

#[test]
fn clipped_block_points_back_inside() {
    let mut s = Scene::default();
    let w = s.canvas.width.to_inches();
    let id = block(&mut s, r(w - 1.0, 2.0, 1.5, 0.75), "Output");
    let issues = lint_boundaries(&s);
    assert_eq!(issues.len(), 1);
    assert_eq!(issues[0].element_ids, vec![id]);
    assert!(issues[0].description.contains("'Output'"));
    assert_eq!(issues[0].fix, "Shift 'Output' LEFT by approximately 0.5 in");
}

#[test]
fn corner_exit_names_both_directions() {
    let mut s = Scene::default();
    block(&mut s, r(-0.25, -0.5, 1.0, 1.0), "X");
    let issues = lint_boundaries(&s);
    assert_eq!(issues.len(), 1);
    assert_eq!(issues[0].fix, "Shift 'X' RIGHT by approximately 0.25 in and DOWN by approximately 0.5 in");
}

#[test]
fn waypoint_outside_canvas_is_one_issue() {
    let mut s = clean();
    let routing = s.connectors[0].routing.as_mut().unwrap();
    let p = routing.waypoints[0];
    routing.waypoints.insert(1, Point::new(p.x, -200_000));
    routing.waypoints.insert(2, Point::new(p.x + 10, -200_000));
    let issues = lint_boundaries(&s);
    assert_eq!(issues.len(), 1);
    assert_eq!(issues[0].element_ids, vec![s.connectors[0].id.clone()]);
}

#[test]
fn straight_connector_through_block_is_severe() {
    let mut s = Scene::default();
    let a = block(&mut s, r(1.0, 2.0, 1.0, 1.0), "A");
    let b = block(&mut s, r(6.0, 2.0, 1.0, 1.0), "B");
    let mid = block(&mut s, r(3.5, 2.25, 1.0, 0.5), "Mid");
    let c = s.add_connector(&a, &b, ConnectorKind::Straight, ConnectorStyle::default()).unwrap();
    let s = route_all(&s, &RouterConfig::default());
    let issues = lint_connectors(&s);
    assert_eq!(issues.len(), 1);
    assert!(issues[0].description.starts_with("SEVERE: "));
    assert_eq!(issues[0].element_ids, vec![c, mid]);
    assert_eq!(issues[0].fix, "Change the connector type to Elbow");
}

#[test]
fn walled_in_fallback_is_reported_with_crossing() {
    let mut s = Scene::default();
    let a = block(&mut s, r(3.0, 3.0, 1.0, 1.0), "A");
    let b = block(&mut s, r(8.0, 3.0, 1.0, 1.0), "B");
    for (x, y, w, h) in [(2.5, 2.5, 2.0, 0.2), (2.5, 4.3, 2.0, 0.2), (2.5, 2.7, 0.2, 1.6), (4.3, 2.7, 0.2, 1.6)] {
        block(&mut s, r(x, y, w, h), "");
    }
    s.add_connector(&a, &b, ConnectorKind::Elbow, ConnectorStyle::default()).unwrap();
    let s = route_all(&s, &RouterConfig::default());
    assert!(s.connectors[0].routing.as_ref().unwrap().fallback);
    let issues = lint_connectors(&s);
    assert!(issues.iter().any(|i| i.description.starts_with("SEVERE: ") && i.element_ids.len() == 2));
    assert!(issues.iter().any(|i| i.description.contains("could not be routed")));
    assert!(issues.iter().all(|i| i.category == Category::Connectors));
}

#[test]
fn thick_line_and_large_arrow() {
    let mut s = Scene::default();
    let a = block(&mut s, r(1.0, 1.0, 1.0, 1.0), "A");
    let b = block(&mut s, r(4.0, 1.0, 1.0, 1.0), "B");
    let style = ConnectorStyle {
        line_width_pt: 3.0,
        ..ConnectorStyle::default()
    };
    s.add_connector(&a, &b, ConnectorKind::Elbow, style).unwrap();
    let s = route_all(&s, &RouterConfig::default());
    let issues = lint_connectors(&s);
    assert_eq!(issues.len(), 1);
    assert_eq!(issues[0].fix, "Set line width to 1.5 pt");

    let mut s2 = s.clone();
    s2.connectors[0].line_width = Emu::points(1.5);
    s2.connectors[0].arrow_head = ArrowHead::Large;
    let issues = lint_connectors(&s2);
    assert_eq!(issues.len(), 1);
    assert_eq!(issues[0].fix, "Reduce arrowhead size to Medium");
}

#[test]
fn long_label_overflows() {
    let mut s = Scene::default();
    let label = "word ".repeat(20);
    let id = s
        .add_text(r(1.0, 1.0, 1.0, 1.0), TextSpec::new(label.trim()).size(14.0), None)
        .unwrap();
    let issues = lint_text(&s);
    assert_eq!(issues.len(), 1);
    assert_eq!(issues[0].category, Category::Text);
    assert_eq!(issues[0].element_ids, vec![id]);
    assert!(issues[0].description.contains("spills"));
}

#[test]
fn overflow_fix_suggests_a_size_that_fits() {
    let mut s = Scene::default();
    s.add_text(r(1.0, 1.0, 2.0, 0.6), TextSpec::new("Multi-Head Attention Layer").size(18.0), None)
        .unwrap();
    let issues = lint_text(&s);
    assert_eq!(issues.len(), 1);
    let fix = &issues[0].fix;
    let size: f64 = fix.trim_end_matches(" pt").rsplit(' ').next().unwrap().parse().unwrap();
    assert!((8.0..18.0).contains(&size), "{fix}");
    s.nodes[0].kind.text_mut().unwrap().font_size = FontSize::from_points(size).unwrap();
    assert!(lint_text(&s).is_empty());
}

#[test]
fn light_and_tiny_text() {
    let mut s = Scene::default();
    s.add_text(r(1.0, 1.0, 2.0, 1.0), TextSpec::new("Feed Forward").color(Color([0xCC; 3])), None)
        .unwrap();
    let issues = lint_text(&s);
    assert_eq!(issues.len(), 1);
    assert_eq!(issues[0].fix, "Change font color to BLACK");

    let mut s = Scene::default();
    s.add_text(r(1.0, 1.0, 2.0, 1.0), TextSpec::new("note").size(6.0), None).unwrap();
    let issues = lint_text(&s);
    assert_eq!(issues.len(), 1);
    assert!(issues[0].fix.ends_with("to 8 pt"));
}

#[test]
fn near_miss_tops_are_one_issue() {
    let mut s = Scene::default();
    block(&mut s, r(1.0, 1.0, 1.0, 1.0), "A");
    block(&mut s, r(3.0, 1.03, 1.0, 1.0), "B");
    let issues = lint_alignment(&s);
    assert_eq!(issues.len(), 1);
    assert!(issues[0].description.contains("top"));
    assert!(issues[0].fix.contains("UP by 0.03 in"));
}

#[test]
fn exact_and_distant_edges_are_fine() {
    let mut s = Scene::default();
    block(&mut s, r(1.0, 1.0, 1.0, 1.0), "A");
    block(&mut s, r(3.0, 1.0, 1.0, 1.0), "B");
    block(&mut s, r(1.2, 3.0, 1.0, 1.0), "C");
    assert!(lint_alignment(&s).is_empty());
}

#[test]
fn containers_are_exempt_and_scope_siblings() {
    let mut s = Scene::default();
    s.add_container(r(0.5, 0.5, 4.0, 3.0), ContainerStyle::default()).unwrap();
    block(&mut s, r(1.0, 1.0, 1.0, 1.0), "A");
    block(&mut s, r(6.0, 1.03, 1.0, 1.0), "B");
    assert!(lint_alignment(&s).is_empty());
}

#[test]
fn overlapping_blocks() {
    let mut s = Scene::default();
    block(&mut s, r(1.0, 1.0, 1.0, 1.0), "A");
    block(&mut s, r(1.5, 2.5, 1.0, 1.0), "B");
    block(&mut s, r(1.5, 2.4, 1.0, 0.25), "C");
    block(&mut s, r(4.0, 2.0, 1.0, 0.25), "D");
    let issues = lint_alignment(&s);
    assert_eq!(issues.iter().filter(|i| i.description.contains("overlaps")).count(), 1);
}

#[test]
fn run_lints_orders_by_category_and_matches_grammar() {
    let mut s = Scene::default();
    let w = s.canvas.width.to_inches();
    block(&mut s, r(1.0, 1.03, 1.0, 1.0), "Near");
    block(&mut s, r(3.0, 1.0, 1.0, 1.0), "Miss");
    s.add_text(r(5.0, 5.0, 2.0, 1.0), TextSpec::new("gray -> label").color(Color([0xCC; 3])), None)
        .unwrap();
    let a = block(&mut s, r(w - 0.5, 3.0, 1.0, 1.0), "Out");
    let b = block(&mut s, r(1.0, 4.0, 1.0, 1.0), "In");
    let style = ConnectorStyle {
        line_width_pt: 3.0,
        ..ConnectorStyle::default()
    };
    s.add_connector(&b, &a, ConnectorKind::Elbow, style).unwrap();
    let s = route_all(&s, &RouterConfig::default());
    let list = run_lints(&s);
    let cats = categories(&list.0);
    let mut sorted = cats.clone();
    sorted.sort();
    assert_eq!(cats, sorted);
    for c in [Category::Boundaries, Category::Connectors, Category::Text, Category::Alignment] {
        assert!(cats.contains(&c), "{c}");
    }
    let text = list.serialize();
    for (k, line) in text.lines().enumerate() {
        assert!(issue_line_regex().is_match(line), "{line}");
        assert!(line.starts_with(&format!("{}. ", k + 1)));
    }
    let back = parse_issue_list(&text).unwrap();
    assert_eq!(back.len(), list.len());
    for (x, y) in back.iter().zip(list.iter()) {
        assert_eq!((x.category, &x.description, &x.fix), (y.category, &y.description, &y.fix));
    }
}

#[test]
fn example_list_round_trips_verbatim() {
    let list = parse_issue_list(EXAMPLE).unwrap();
    assert_eq!(list.len(), 4);
    assert_eq!(list.0[0].category, Category::Boundaries);
    assert_eq!(list.0[3].fix, "Change font color to BLACK.");
    assert_eq!(list.serialize(), EXAMPLE);
}

#[test]
fn parse_errors_carry_line_numbers() {
    assert!(parse_issue_list("").unwrap().is_empty());
    assert!(parse_issue_list("\n  \n").unwrap().is_empty());
    let e = parse_issue_list("[FOO] x -> y").unwrap_err();
    assert_eq!((e.line, e.code), (1, IssueParseCode::UnknownCategory));
    let e = parse_issue_list("1. [TEXT] a -> b\n2. TEXT a -> b").unwrap_err();
    assert_eq!((e.line, e.code), (2, IssueParseCode::MissingCategory));
    let e = parse_issue_list("\n3. [TEXT] no separator").unwrap_err();
    assert_eq!((e.line, e.code), (2, IssueParseCode::MissingSeparator));
    let e = parse_issue_list("1. [TEXT]  -> b").unwrap_err();
    assert_eq!(e.code, IssueParseCode::EmptyField);
}

#[test]
fn parse_tolerates_numbering_and_whitespace() {
    let list = parse_issue_list("  7)  [STYLE]   muted palette   ->   keep it  \n[TEXT] a -> b").unwrap();
    assert_eq!(list.0[0].description, "muted palette");
    assert_eq!(list.0[0].fix, "keep it");
    assert_eq!(list.0[1].category, Category::Text);
}

#[test]
fn lenient_parse_skips_chatter() {
    let text = "Here are the issues:\n1. [TEXT] a -> b\n2. [FOO] c -> d\nThanks";
    let (list, rejected) = parse_issue_list_lenient(text);
    assert_eq!(list.len(), 1);
    assert_eq!(rejected.iter().map(|e| e.line).collect::<Vec<_>>(), vec![1, 3, 4]);
}

#[test]
fn sanitized_names_keep_the_grammar() {
    let i = Issue::new(Category::Text, "'a -> b'\nsecond", "x", vec![]);
    assert_eq!(i.description, "'a \u{2192} b' second");
    let line = IssueList(vec![i.clone()]).serialize();
    assert_eq!(parse_issue_list(&line).unwrap().0[0].description, i.description);
}

#[test]
fn issue_json_shape() {
    let list = IssueList(vec![Issue::new(Category::Alignment, "d", "f", vec![ElementId::new("a").unwrap()])]);
    let v = serde_json::to_value(&list).unwrap();
    assert_eq!(v[0]["category"], "ALIGNMENT");
    assert_eq!(v[0]["element_ids"][0], "a");
    let back: IssueList = serde_json::from_value(v).unwrap();
    assert_eq!(back, list);
}
