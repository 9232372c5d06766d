import { describe, expect, it } from "vitest";
import { emEdge, emMarkerAt, emWorldAxis, emWorldMidpoint } from "../src/em.js";
import { quatFromAxisAngle } from "../src/orientation.js";
import type { CubeRecord } from "../src/protocol.js";

function cube(
  id: number,
  x: number,
  y: number,
  z: number,
  orientation = 0,
): CubeRecord {
  return { id, x, y, z, orientation };
}

describe("electromagnet edge numbering", () => {
  it("assigns em 1..4 along X, 5..8 along Y, 9..12 along Z", () => {
    for (let em = 1; em <= 12; em++) {
      expect(emEdge(em).axis).toBe((em - 1) >> 2);
    }
  });

  it("reproduces em = 4*axis + 2*bit(s2) + bit(s1) + 1", () => {
    const NON_AXIS = [
      [1, 2],
      [2, 0],
      [0, 1],
    ] as const;
    for (let em = 1; em <= 12; em++) {
      const edge = emEdge(em);
      expect(edge.midpoint[edge.axis]).toBe(0);
      const [c1, c2] = NON_AXIS[edge.axis];
      const s1 = edge.midpoint[c1]!;
      const s2 = edge.midpoint[c2]!;
      expect(Math.abs(s1)).toBe(0.5);
      expect(Math.abs(s2)).toBe(0.5);
      const bit1 = s1 > 0 ? 1 : 0;
      const bit2 = s2 > 0 ? 1 : 0;
      expect(4 * edge.axis + 2 * bit2 + bit1 + 1).toBe(em);
    }
  });

  it("the 12 edges cover all midpoint sign combinations uniquely", () => {
    const seen = new Set(
      Array.from({ length: 12 }, (_, i) => {
        const e = emEdge(i + 1);
        return `${e.axis}:${e.midpoint.join(",")}`;
      }),
    );
    expect(seen.size).toBe(12);
  });

  it("rejects ids outside 1..12", () => {
    expect(() => emEdge(0)).toThrow(RangeError);
    expect(() => emEdge(13)).toThrow(RangeError);
    expect(() => emEdge(1.5)).toThrow(RangeError);
  });
});

describe("world placement", () => {
  // The hinge pair of the two-cube pivot: em 7 of the cube at (0,0,1) and
  // em 8 of the cube at (0,0,0) sit on the same world edge — the hinge
  // line y through (0.5, 0, 0.5).
  it("places the known hinge pair on the shared edge", () => {
    const top = emWorldMidpoint(cube(2, 0, 0, 1), 7);
    const bottom = emWorldMidpoint(cube(1, 0, 0, 0), 8);
    expect(top).toEqual([0.5, 0, 0.5]);
    expect(bottom).toEqual([0.5, 0, 0.5]);
    expect(emWorldAxis(cube(2, 0, 0, 1), 7)).toEqual([0, 1, 0]);
    expect(emWorldAxis(cube(1, 0, 0, 0), 8)).toEqual([0, 1, 0]);
  });

  it("any orientation keeps the 12 midpoints on the cube's edges", () => {
    for (let orientation = 0; orientation < 24; orientation++) {
      const c = cube(1, 3, -2, 5, orientation);
      const mids = new Set<string>();
      for (let em = 1; em <= 12; em++) {
        const [x, y, z] = emWorldMidpoint(c, em);
        // every edge midpoint has one body-centered coordinate at 0 and
        // the other two at +/-0.5, wherever the cube is rotated to
        const local = [x - 3, y + 2, z - 5].map((v) => Math.round(v * 2) / 2);
        expect(local.filter((v) => v === 0)).toHaveLength(1);
        expect(local.filter((v) => Math.abs(v) === 0.5)).toHaveLength(2);
        mids.add(local.join(","));
      }
      expect(mids.size).toBe(12);
    }
  });

  it("marker placement follows an animated pose", () => {
    // quarter-swing pose: rotated 90 degrees about y, mid-flight position
    const pose = quatFromAxisAngle([0, 1, 0], Math.PI / 2);
    const at = emMarkerAt([1, 0, 1], pose, 7);
    // em 7 body midpoint (0.5, 0, -0.5) rotates to (-0.5, 0, -0.5)
    expect(at[0]).toBeCloseTo(0.5, 12);
    expect(at[1]).toBeCloseTo(0, 12);
    expect(at[2]).toBeCloseTo(0.5, 12);
  });
});
