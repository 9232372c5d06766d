/** Client-side mirror of the authoritative lattice state.
 *
 * The mirror never mutates itself from user input: it is only rebuilt from
 * server state payloads.  Its canonical serialization — one line
 * `id x y z orientation` per cube in ascending id order, joined with
 * newlines — matches the service byte for byte, so the SHA-256 of that
 * text reconciles directly against the server's state hash.
 */
function addressKey(x, y, z) {
    return `${x},${y},${z}`;
}
export class LatticeMirror {
    byId = new Map();
    occupancy = new Map();
    static fromState(payload) {
        const mirror = new LatticeMirror();
        for (const cube of payload.cubes) {
            mirror.add(cube);
        }
        return mirror;
    }
    add(cube) {
        if (this.byId.has(cube.id)) {
            throw new Error(`duplicate cube id ${cube.id}`);
        }
        const key = addressKey(cube.x, cube.y, cube.z);
        if (this.occupancy.has(key)) {
            throw new Error(`two cubes share the cell (${key})`);
        }
        this.byId.set(cube.id, { ...cube });
        this.occupancy.set(key, cube.id);
    }
    get size() {
        return this.byId.size;
    }
    cube(id) {
        return this.byId.get(id);
    }
    cubes() {
        return [...this.byId.values()].sort((a, b) => a.id - b.id);
    }
    occupied(x, y, z) {
        return this.occupancy.has(addressKey(x, y, z));
    }
    occupant(x, y, z) {
        return this.occupancy.get(addressKey(x, y, z));
    }
    canonicalLines() {
        return this.cubes().map((c) => `${c.id} ${c.x} ${c.y} ${c.z} ${c.orientation}`);
    }
    async stateHash() {
        return sha256Hex(this.canonicalLines().join("\n"));
    }
}
/** SHA-256 of a UTF-8 string, lowercase hex (Web Crypto; works in Node too). */
export async function sha256Hex(text) {
    const bytes = new TextEncoder().encode(text);
    const digest = await crypto.subtle.digest("SHA-256", bytes);
    return [...new Uint8Array(digest)]
        .map((b) => b.toString(16).padStart(2, "0"))
        .join("");
}
export function sameCell(a, b) {
    return a[0] === b[0] && a[1] === b[1] && a[2] === b[2];
}
