/** The 24 axis-aligned cube orientations, mirrored from the service.
 *
 * The service serializes each cube's orientation as an index into its
 * canonical table of the 24 proper axis-aligned rotations, stored as unit
 * quaternions with w >= 0 (ties broken by the first nonzero of x, y, z
 * being positive) and ordered by the key (-w, x, y, z) with components
 * rounded to 9 decimals.  The table below lists those exact quaternions in
 * that exact order; index 0 is the identity.  Unit tests pin the table
 * against the documented convention and against known service indices.
 */

import type { Vec3 } from "./protocol.js";

export interface Quat {
  w: number;
  x: number;
  y: number;
  z: number;
}

const H = Math.SQRT1_2; // 0.7071067811865476
const HV = 0.7071067811865475; // vector part under the canonical w >= 0 form

export const ORIENTATIONS: readonly Quat[] = [
  { w: 1.0, x: 0.0, y: 0.0, z: 0.0 },
  { w: H, x: -HV, y: 0.0, z: 0.0 },
  { w: H, x: 0.0, y: -HV, z: 0.0 },
  { w: H, x: 0.0, y: 0.0, z: -HV },
  { w: H, x: 0.0, y: 0.0, z: HV },
  { w: H, x: 0.0, y: HV, z: 0.0 },
  { w: H, x: HV, y: 0.0, z: 0.0 },
  { w: 0.5, x: -0.5, y: -0.5, z: -0.5 },
  { w: 0.5, x: -0.5, y: -0.5, z: 0.5 },
  { w: 0.5, x: -0.5, y: 0.5, z: -0.5 },
  { w: 0.5, x: -0.5, y: 0.5, z: 0.5 },
  { w: 0.5, x: 0.5, y: -0.5, z: -0.5 },
  { w: 0.5, x: 0.5, y: -0.5, z: 0.5 },
  { w: 0.5, x: 0.5, y: 0.5, z: -0.5 },
  { w: 0.5, x: 0.5, y: 0.5, z: 0.5 },
  { w: 0.0, x: 0.0, y: 0.0, z: 1.0 },
  { w: 0.0, x: 0.0, y: H, z: -HV },
  { w: 0.0, x: 0.0, y: H, z: HV },
  { w: 0.0, x: 0.0, y: 1.0, z: 0.0 },
  { w: 0.0, x: H, y: -HV, z: 0.0 },
  { w: 0.0, x: H, y: 0.0, z: -HV },
  { w: 0.0, x: H, y: 0.0, z: HV },
  { w: 0.0, x: H, y: HV, z: 0.0 },
  { w: 0.0, x: 1.0, y: 0.0, z: 0.0 },
];

export function orientationFromIndex(index: number): Quat {
  const q = ORIENTATIONS[index];
  if (q === undefined) {
    throw new RangeError(`orientation index out of range: ${index}`);
  }
  return q;
}

/** Hamilton product a*b (apply b first, then a). */
export function quatMultiply(a: Quat, b: Quat): Quat {
  return {
    w: a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
    x: a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
    y: a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
    z: a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
  };
}

export function quatFromAxisAngle(axis: Vec3, angle: number): Quat {
  const n = Math.hypot(axis[0], axis[1], axis[2]);
  if (n === 0) {
    throw new Error("zero rotation axis");
  }
  const s = Math.sin(angle / 2) / n;
  return {
    w: Math.cos(angle / 2),
    x: axis[0] * s,
    y: axis[1] * s,
    z: axis[2] * s,
  };
}

/** Rotate a vector by a unit quaternion. */
export function rotateVec(q: Quat, v: Vec3): Vec3 {
  // v' = v + 2*qv x (qv x v + w*v)
  const [vx, vy, vz] = v;
  const tx = 2 * (q.y * vz - q.z * vy);
  const ty = 2 * (q.z * vx - q.x * vz);
  const tz = 2 * (q.x * vy - q.y * vx);
  return [
    vx + q.w * tx + (q.y * tz - q.z * ty),
    vy + q.w * ty + (q.z * tx - q.x * tz),
    vz + q.w * tz + (q.x * ty - q.y * tx),
  ];
}

/** Snap a quaternion onto its nearest table entry (tolerance 1e-6). */
export function snapOrientationIndex(q: Quat): number {
  const flipped: Quat = { w: -q.w, x: -q.x, y: -q.y, z: -q.z };
  const candidates = q.w >= 0 ? [q] : [flipped];
  // w == 0 sits on the double-cover boundary: try both signs.
  if (Math.abs(q.w) <= 1e-6) {
    candidates.push(candidates[0] === q ? flipped : q);
  }
  for (const cand of candidates) {
    for (let i = 0; i < ORIENTATIONS.length; i++) {
      const o = ORIENTATIONS[i]!;
      if (
        Math.abs(cand.w - o.w) <= 1e-6 &&
        Math.abs(cand.x - o.x) <= 1e-6 &&
        Math.abs(cand.y - o.y) <= 1e-6 &&
        Math.abs(cand.z - o.z) <= 1e-6
      ) {
        return i;
      }
    }
  }
  throw new Error("orientation is not one of the 24 cube rotations");
}
