//! Hand-built metric cases.

/// Hand-built (candidate, references) cases.
pub fn cases() -> Vec<(&'static str, Vec<&'static str>)> {
    vec![
        ("go back", vec!["go back 15 seconds"]),
        ("select angola", vec!["set your location to angola"]),
        ("delete", vec!["delete"]),
        ("volume", vec!["delete"]),
        ("go back 15 seconds", vec!["go back 15 seconds", "rewind 15 seconds"]),
        ("open the menu", vec!["open menu", "show the navigation menu", "menu"]),
        ("the the the the", vec!["the cat is on the mat"]),
        ("share this post", vec!["share post", "send post to friends"]),
        ("deleting items", vec!["delete item", "remove items"]),
        ("play the next song", vec!["next song", "skip to next track", "play next"]),
        ("seconds back go", vec!["go back 15 seconds"]),
        ("add to favorites", vec!["add to favourites", "like this", "favorite"]),
        ("search", vec!["search for products", "find"]),
        ("close the dialog window now", vec!["close dialog"]),
        ("zoom in on the map", vec!["zoom in", "enlarge map view"]),
        ("a b a b a b", vec!["a b", "b a b a"]),
        ("mute the mute button", vec!["mute", "unmute audio"]),
        ("refresh feed", vec!["refresh the news feed", "reload feed", "update"]),
        ("navigate up", vec!["navigate up one level", "go up", "back"]),
        ("send message to contact", vec!["send a message", "message contact", "compose message to contact"]),
        ("toggle wifi settings", vec!["wifi settings toggle", "turn wifi on or off"]),
        ("saved", vec!["save", "saves", "saving"]),
        ("take a photo", vec!["capture photo", "take picture", "camera"]),
    ]
}
