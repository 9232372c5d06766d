/** Electromagnet edge geometry, mirrored from the service convention.
 *
 * A cube's 12 edge electromagnets are numbered 1..12 by
 *
 *     em = 4*axis + 2*bit(s2) + bit(s1) + 1
 *
 * where `axis` is the body axis the edge runs along and (s1, s2) are the
 * signs of the edge midpoint on the two non-axis body coordinates taken in
 * cyclic order (X -> (y, z), Y -> (z, x), Z -> (x, y)); bit(+) = 1,
 * bit(-) = 0.  So em 1..4 run along X, 5..8 along Y, 9..12 along Z.  The
 * body frame is the unit cube centered on its grid address.
 */
import { orientationFromIndex, rotateVec } from "./orientation.js";
/** Non-axis coordinate order per edge axis: X->(y,z), Y->(z,x), Z->(x,y). */
const NON_AXIS = [
    [1, 2],
    [2, 0],
    [0, 1],
];
/** Body-frame edge of electromagnet `em` (1..12). */
export function emEdge(em) {
    if (!Number.isInteger(em) || em < 1 || em > 12) {
        throw new RangeError(`electromagnet id out of range: ${em}`);
    }
    const axis = ((em - 1) >> 2);
    const rem = (em - 1) & 3;
    const s1 = (rem & 1) === 1 ? 0.5 : -0.5;
    const s2 = (rem & 2) === 2 ? 0.5 : -0.5;
    const midpoint = [0, 0, 0];
    const [c1, c2] = NON_AXIS[axis];
    midpoint[c1] = s1;
    midpoint[c2] = s2;
    return { axis, midpoint };
}
/** World-space midpoint of a cube's electromagnet in its current pose. */
export function emWorldMidpoint(cube, em) {
    const edge = emEdge(em);
    const q = orientationFromIndex(cube.orientation);
    const r = rotateVec(q, edge.midpoint);
    return [cube.x + r[0], cube.y + r[1], cube.z + r[2]];
}
/** World-space direction the electromagnet's edge runs along. */
export function emWorldAxis(cube, em) {
    const edge = emEdge(em);
    const unit = [0, 0, 0];
    unit[edge.axis] = 1;
    const q = orientationFromIndex(cube.orientation);
    return rotateVec(q, unit);
}
/** Marker placement for an animated pose (float position + live rotation). */
export function emMarkerAt(position, pose, em) {
    const edge = emEdge(em);
    const r = rotateVec(pose, edge.midpoint);
    return [position[0] + r[0], position[1] + r[1], position[2] + r[2]];
}
/** Polarity display colors: +1 red, -1 blue, 0 (off) gray. */
export const POLARITY_COLORS = {
    1: 0xe04838,
    [-1]: 0x3868e0,
    0: 0x8a8a8a,
};
