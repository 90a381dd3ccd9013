import assert from "node:assert/strict";
import test from "node:test";

import { changedNames, deltaMethodNames, diffMethods, splitMethods } from "../src/diff.js";

const BEFORE = `role GreenBug {
    let species = "Green-Bug"
    let hp_base = 45
    fn move_1(foe) {
        deal_damage(40, "physical", "Bug")
    }
    fn move_2(foe) {
        deal_damage(40, "physical", "Bug")
    }
}
`;

const AFTER = `role GreenBug {
    let species = "Green-Bug"
    let hp_base = 45
    fn move_1(foe) {
        deal_damage(40, "physical", "Bug")
    }
    fn move_2(foe) {
        deal_damage(80, "physical", "Bug")
    }
    fn move_3(foe) {
        if chance(0.5) {
            set_flag("protected", 1)
        }
    }
}
`;

test("splitMethods chunks header and methods", () => {
  const chunks = splitMethods(BEFORE);
  assert.ok(chunks.header.includes('let species = "Green-Bug"'));
  assert.deepEqual(
    chunks.methods.map((m) => m.name),
    ["move_1", "move_2"],
  );
  assert.ok(chunks.methods[0].text.startsWith("    fn move_1(foe) {"));
  assert.ok(chunks.methods[0].text.endsWith("    }"));
});

test("splitMethods handles nested blocks", () => {
  const chunks = splitMethods(AFTER);
  const move3 = chunks.methods.find((m) => m.name === "move_3");
  assert.ok(move3);
  assert.ok(move3.text.includes('set_flag("protected", 1)'));
  assert.equal(chunks.methods.length, 3);
});

test("diffMethods classifies added, replaced, unchanged", () => {
  const diff = diffMethods(BEFORE, AFTER);
  const byName = new Map(diff.map((d) => [d.name, d.kind]));
  assert.equal(byName.get("move_1"), "unchanged");
  assert.equal(byName.get("move_2"), "replaced");
  assert.equal(byName.get("move_3"), "added");
  assert.deepEqual(changedNames(diff), ["move_2", "move_3"]);
  const replaced = diff.find((d) => d.name === "move_2")!;
  assert.ok(replaced.before!.includes("40"));
  assert.ok(replaced.after.includes("80"));
});

test("diffMethods of identical code is all-unchanged", () => {
  assert.ok(diffMethods(BEFORE, BEFORE).every((d) => d.kind === "unchanged"));
});

test("deltaMethodNames reads increment sources", () => {
  const delta = `increment GreenBug {
    fn move_3(foe) {
        rayquazalize()
    }
    fn rayquazalize() {
        type_change("Dragon")
    }
}
`;
  assert.deepEqual(deltaMethodNames(delta), ["move_3", "rayquazalize"]);
});
