"""In-page scripts evaluated over the wire protocol.

Each script is a function body executed with `arguments` in the page
context and must return JSON-serializable data only.
"""

# Shared helpers injected ahead of every script body.
_PRELUDE = r"""
var INTERACTIVE_ROLES = {button:1, link:1, checkbox:1, radio:1, switch:1, tab:1,
  menuitem:1, menuitemcheckbox:1, menuitemradio:1, combobox:1, listbox:1,
  option:1, searchbox:1, slider:1, spinbutton:1, textbox:1};
var NATIVE_TAGS = {a:1, area:1, button:1, input:1, select:1, textarea:1, summary:1};

function isVisible(el) {
  var style = window.getComputedStyle(el);
  if (style.display === 'none' || style.visibility === 'hidden') return false;
  if (parseFloat(style.opacity) === 0) return false;
  var r = el.getBoundingClientRect();
  return r.width > 0 && r.height > 0;
}

function cssPath(el) {
  if (el.id && document.querySelectorAll('#' + CSS.escape(el.id)).length === 1) {
    return '#' + CSS.escape(el.id);
  }
  var parts = [];
  var node = el;
  while (node && node.nodeType === 1 && node.tagName !== 'HTML') {
    var part = node.tagName.toLowerCase();
    var parent = node.parentElement;
    if (parent) {
      var same = [];
      for (var i = 0; i < parent.children.length; i++) {
        if (parent.children[i].tagName === node.tagName) same.push(parent.children[i]);
      }
      if (same.length > 1) part += ':nth-of-type(' + (same.indexOf(node) + 1) + ')';
    }
    parts.unshift(part);
    var selector = parts.join(' > ');
    if (document.querySelectorAll(selector).length === 1) return selector;
    node = parent;
  }
  return parts.join(' > ');
}

function normText(s) {
  return (s || '').replace(/\s+/g, ' ').trim();
}

function bodyText(limit) {
  return normText(document.body ? document.body.innerText : '').slice(0, limit);
}

function overlayKeys() {
  var keys = [];
  var all = document.querySelectorAll('*');
  var vw = window.innerWidth, vh = window.innerHeight;
  for (var i = 0; i < all.length; i++) {
    var el = all[i];
    if (!isVisible(el)) continue;
    var role = el.getAttribute && el.getAttribute('role');
    var isDialog = role === 'dialog' || role === 'alertdialog' ||
      (el.tagName === 'DIALOG' && el.hasAttribute('open')) ||
      el.getAttribute('aria-modal') === 'true';
    var covering = false;
    if (!isDialog) {
      var style = window.getComputedStyle(el);
      if (style.position === 'fixed') {
        var r = el.getBoundingClientRect();
        covering = (r.width * r.height) >= 0.25 * vw * vh;
      }
    }
    if (isDialog || covering) keys.push(cssPath(el));
  }
  return keys;
}

function newOverlay(beforeKeys) {
  var seen = {};
  for (var i = 0; i < beforeKeys.length; i++) seen[beforeKeys[i]] = 1;
  var now = overlayKeys();
  for (var j = 0; j < now.length; j++) {
    if (!seen[now[j]]) return true;
  }
  return false;
}

var WATCHED_ATTRS = ['aria-checked', 'aria-pressed', 'aria-expanded',
  'aria-selected', 'aria-disabled', 'open', 'class'];

function elementState(el) {
  var state = {};
  for (var i = 0; i < WATCHED_ATTRS.length; i++) {
    var v = el.getAttribute(WATCHED_ATTRS[i]);
    if (v !== null) state[WATCHED_ATTRS[i]] = v;
  }
  if ('checked' in el) state['checked'] = String(el.checked);
  if ('value' in el && el.tagName !== 'BUTTON') state['value'] = String(el.value);
  return state;
}
"""

EXTRACT_SNAPSHOT = _PRELUDE + r"""
var out = {candidates: [], links: [], headings: [], body_digest: bodyText(20000)};
var seen = {};
var nodes = document.querySelectorAll(
  'a,area,button,input,select,textarea,summary,[role],[contenteditable="true"],' +
  '[aria-checked],[aria-pressed],[aria-expanded]');
for (var i = 0; i < nodes.length; i++) {
  var el = nodes[i];
  var tag = el.tagName.toLowerCase();
  var role = (el.getAttribute('role') || '').toLowerCase();
  var interactive = NATIVE_TAGS[tag] || INTERACTIVE_ROLES[role] ||
    el.getAttribute('contenteditable') === 'true' ||
    el.hasAttribute('aria-checked') || el.hasAttribute('aria-pressed') ||
    el.hasAttribute('aria-expanded');
  if (!interactive || !isVisible(el)) continue;
  var loc = cssPath(el);
  if (seen[loc]) continue;
  seen[loc] = 1;
  var r = el.getBoundingClientRect();
  var attrs = {};
  var names = ['role', 'type', 'title', 'name', 'placeholder', 'alt', 'value',
    'aria-label', 'aria-checked', 'aria-pressed', 'aria-expanded',
    'aria-selected', 'contenteditable', 'id', 'data-href', 'routerlink', 'to'];
  for (var k = 0; k < names.length; k++) {
    var v = el.getAttribute(names[k]);
    if (v !== null && v !== '') attrs[names[k]] = v;
  }
  if (el.href) attrs['href'] = String(el.href);
  else if (el.getAttribute('href') !== null) attrs['href'] = el.getAttribute('href');
  var text = normText(el.innerText || el.value || el.getAttribute('aria-label') || '');
  out.candidates.push({
    locator: loc,
    tag_or_role: (!NATIVE_TAGS[tag] && INTERACTIVE_ROLES[role]) ? role : tag,
    box: {x: r.left + window.scrollX, y: r.top + window.scrollY,
          width: r.width, height: r.height},
    text: text.slice(0, 200),
    attributes: attrs,
    visible: true
  });
}
var anchors = document.querySelectorAll('a[href]');
var here = window.location;
for (var j = 0; j < anchors.length; j++) {
  try {
    var u = new URL(anchors[j].href, here.href);
    if (u.origin === here.origin) {
      u.hash = '';
      out.links.push(u.href);
    }
  } catch (e) {}
}
var hs = document.querySelectorAll('h1,h2,h3,h4,h5,h6');
for (var m = 0; m < hs.length; m++) {
  if (isVisible(hs[m])) {
    var t = normText(hs[m].innerText);
    if (t) out.headings.push(t.slice(0, 200));
  }
}
return out;
"""

# args: [locator]
PROBE_BEFORE = _PRELUDE + r"""
var el = document.querySelector(arguments[0]);
if (!el) return {error: 'stale'};
return {
  url: window.location.href,
  state: elementState(el),
  overlays: overlayKeys(),
  body: bodyText(20000)
};
"""

# args: [locator, action, value]
# action: click | input | read_href
PROBE_ACT = _PRELUDE + r"""
var el = document.querySelector(arguments[0]);
if (!el) return {error: 'stale'};
var action = arguments[1];
if (action === 'click') {
  el.click();
  return {ok: true};
}
if (action === 'input') {
  var value = arguments[2];
  var accepted = false;
  var dispatched = [];
  try {
    if (el.isContentEditable) {
      el.innerText = value;
      accepted = normText(el.innerText) === normText(value);
    } else if (el.tagName === 'SELECT') {
      if (el.options.length > 0) {
        el.selectedIndex = el.options.length - 1;
        accepted = true;
      }
    } else {
      el.value = value;
      accepted = String(el.value) === String(value);
    }
    var types = ['input', 'change'];
    for (var i = 0; i < types.length; i++) {
      el.dispatchEvent(new Event(types[i], {bubbles: true}));
      dispatched.push(types[i]);
    }
  } catch (e) {
    return {error: 'input failed: ' + e.message};
  }
  return {ok: true, accepted: accepted, dispatched: dispatched};
}
if (action === 'read_href') {
  var href = el.href || el.getAttribute('href') || el.getAttribute('data-href') || '';
  if (href) {
    try { href = new URL(href, window.location.href).href; } catch (e) {}
  }
  return {ok: true, href: String(href)};
}
return {error: 'unknown action ' + action};
"""

# args: [locator, before_overlays]
PROBE_AFTER = _PRELUDE + r"""
var el = document.querySelector(arguments[0]);
return {
  url: window.location.href,
  state: el ? elementState(el) : null,
  overlay_appeared: newOverlay(arguments[1] || []),
  body: bodyText(20000)
};
"""

PAGE_HEIGHT = "return Math.max(document.documentElement.scrollHeight, document.body ? document.body.scrollHeight : 0);"
