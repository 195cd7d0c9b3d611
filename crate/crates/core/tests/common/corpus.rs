//! Synthetic corpora with hand-enumerated expectations.

use std::path::Path;

use altgen::cli::{MockFixture, MockRule};
use altgen::dataset::{AnnotatedIcon, Split};
use altgen::ui_model::{BoundingBox, IconContext, NodeProps};
use serde_json::{json, Value};

const VERBS: [&str; 10] = ["open", "close", "share", "delete", "save", "play", "pause", "search", "refresh", "download"];
const OBJECTS: [&str; 5] = ["current playlist", "saved article", "shopping cart", "profile settings", "photo album"];

/// `n` test-split icons, each with a unique resource id `icon_NNN` and one
/// reference of five or more tokens.
pub fn eval_icons(n: usize) -> Vec<AnnotatedIcon> {
    (0..n)
        .map(|i| {
            let rid = format!("icon_{i:03}");
            let label = format!("{} the {} number {i}", VERBS[i % VERBS.len()], OBJECTS[(i / VERBS.len()) % OBJECTS.len()]);
            AnnotatedIcon {
                screen_id: format!("screen{:02}", i / 5),
                path: vec![0, i % 5],
                bounds: BoundingBox::new(0, 0, 96, 96).unwrap(),
                split: Split::Test,
                labels: vec![label],
                context: IconContext {
                    app_activity_name: "com.example.MainActivity".into(),
                    ui_element_info: NodeProps::new(Some("ImageButton"), Some(&rid), None),
                    parent_node: Some(NodeProps::new(Some("LinearLayout"), Some("toolbar"), None)),
                    ..Default::default()
                },
                parent_bounds: None,
                screenshot: None,
            }
        })
        .collect()
}

/// Mock rules answering each icon with its own reference.
pub fn echo_fixture(icons: &[AnnotatedIcon]) -> MockFixture {
    MockFixture {
        rules: icons
            .iter()
            .map(|icon| MockRule {
                pattern: Some(format!("\"{}\"", icon.context.ui_element_info.resource_id().unwrap())),
                reply: icon.labels[0].clone(),
                ..Default::default()
            })
            .collect(),
        ..Default::default()
    }
}

pub fn constant_fixture(reply: &str) -> MockFixture {
    MockFixture {
        default_reply: Some(reply.into()),
        ..Default::default()
    }
}

fn node(class: &str, id: Option<&str>, bounds: [i64; 4], clickable: bool, children: Vec<Value>) -> Value {
    let mut v = json!({
        "class": class,
        "bounds": bounds,
        "clickable": clickable,
        "children": children,
    });
    if let Some(id) = id {
        v["resource-id"] = json!(format!("com.example:id/{id}"));
    }
    v
}

fn screen(activity: &str, children: Vec<Value>) -> Value {
    json!({
        "activity_name": format!("com.example/com.example.{activity}"),
        "activity": { "root": node("FrameLayout", None, [0, 0, 1440, 2560], false, children) }
    })
}

/// Expected outcome of building the mini corpus written by [`write_mini_rico`].
pub struct MiniRicoExpectation {
    pub train: (usize, usize),
    pub valid: (usize, usize),
    pub test: (usize, usize),
    pub screens: usize,
    pub unknown_screen_captions: usize,
    pub unmatched_captions: usize,
    pub size_filtered_icons: usize,
    pub unsplit_icons: usize,
    pub truncated_label_sets: usize,
    /// Test-split labels keyed by resource id.
    pub test_labels: Vec<(&'static str, Vec<&'static str>)>,
}

/// Four screens, captions and splits under `dir` (`rico/`, `captions.csv`,
/// `splits.csv`).
///
/// s1 (train): `back` 3 captions, `menu` 4 captions (cut to 3), `photo` too
///   wide (filtered, captioned), `deco` a non-clickable ImageView (its caption
///   never matches).
/// s2 (test): `share` 3, `fav` 2, `narrow` 8:1 and `tiny` 4 px (filtered, no
///   captions), plus a null child.
/// s3 (valid): `play` 2, `uncaptioned` without captions.
/// s4 (no split row): `orphan` 1.
/// A caption row for the unknown screen s9.
pub fn write_mini_rico(dir: &Path) -> MiniRicoExpectation {
    let rico = dir.join("rico");
    std::fs::create_dir_all(&rico).unwrap();
    let s1 = screen(
        "MainActivity",
        vec![
            node(
                "android.widget.LinearLayout",
                Some("toolbar"),
                [0, 0, 1440, 200],
                false,
                vec![
                    node("android.widget.ImageButton", Some("back"), [0, 0, 100, 100], true, vec![]),
                    node("android.widget.ImageButton", Some("menu"), [100, 0, 200, 100], true, vec![]),
                ],
            ),
            node("android.widget.ImageView", Some("photo"), [0, 200, 1000, 1200], true, vec![]),
            node("android.widget.ImageView", Some("deco"), [0, 1300, 100, 1400], false, vec![]),
        ],
    );
    let mut s2 = screen(
        "FeedActivity",
        vec![
            node("android.widget.ImageButton", Some("share"), [0, 0, 96, 96], true, vec![]),
            node("android.widget.ImageButton", Some("narrow"), [0, 100, 400, 150], true, vec![]),
            node("android.widget.ImageButton", Some("tiny"), [0, 200, 4, 204], true, vec![]),
            node("androidx.appcompat.widget.AppCompatImageButton", Some("fav"), [200, 0, 296, 96], true, vec![]),
        ],
    );
    s2["activity"]["root"]["children"].as_array_mut().unwrap().insert(1, Value::Null);
    let s3 = screen(
        "PlayerActivity",
        vec![
            node("android.widget.ImageButton", Some("play"), [0, 0, 96, 96], true, vec![]),
            node("android.widget.ImageButton", Some("uncaptioned"), [100, 0, 196, 96], true, vec![]),
        ],
    );
    let s4 = screen("OtherActivity", vec![node("android.widget.ImageButton", Some("orphan"), [0, 0, 96, 96], true, vec![])]);
    for (id, doc) in [("s1", s1), ("s2", s2), ("s3", s3), ("s4", s4)] {
        std::fs::write(rico.join(format!("{id}.json")), serde_json::to_vec_pretty(&doc).unwrap()).unwrap();
    }
    std::fs::write(
        dir.join("captions.csv"),
        "screen_id,left,top,right,bottom,captions\n\
         s1,0,0,100,100,go back|navigate back|return\n\
         s1,100,0,200,100,open menu|more options|menu|show navigation\n\
         s1,0,200,1000,1200,view photo\n\
         s1,0,1300,100,1400,decoration\n\
         s2,0,0,96,96,share post|share this|send to friends\n\
         s2,200,0,296,96,add to favorites|like\n\
         s3,0,0,96,96,play|start playback\n\
         s4,0,0,96,96,orphan caption\n\
         s9,0,0,96,96,nobody home\n",
    )
    .unwrap();
    std::fs::write(dir.join("splits.csv"), "screen_id,split\ns1,train\ns2,test\ns3,valid\n").unwrap();
    MiniRicoExpectation {
        train: (2, 6),
        valid: (1, 2),
        test: (2, 5),
        screens: 3,
        unknown_screen_captions: 1,
        unmatched_captions: 1,
        size_filtered_icons: 1,
        unsplit_icons: 1,
        truncated_label_sets: 1,
        test_labels: vec![
            ("share", vec!["share post", "share this", "send to friends"]),
            ("fav", vec!["add to favorites", "like"]),
        ],
    }
}
