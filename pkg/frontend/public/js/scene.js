/** three.js scene graph for the lattice viewport.
 *
 * Z is up, matching lattice coordinates (the camera's up vector is +Z so
 * no axis remapping — and no handedness flip — happens between the
 * service's geometry and the screen).  Proxy cubes render as one
 * instanced mesh (a single draw call at any count); full-fidelity cubes
 * are pooled groups with edge electromagnets.  All visual state arrives
 * through `update(renderState)`; nothing here mutates lattice data.
 */
import * as THREE from "three";
import { OrbitControls } from "three/addons/controls/OrbitControls.js";
import { POLARITY_COLORS, emMarkerAt } from "./em.js";
const CUBE_SIZE = 0.92;
const PROXY_COLOR = new THREE.Color(0xb9c4d0);
const FULL_COLOR = new THREE.Color(0xdde3ea);
const TRAVEL_COLOR = new THREE.Color(0xf2c14e);
const SELECT_COLOR = new THREE.Color(0x7fd1b9);
const AXIS_COLORS = {
    x: 0xd9544d,
    y: 0x57a457,
    z: 0x4a7fd9,
};
export class SceneView {
    container;
    callbacks;
    renderer;
    scene = new THREE.Scene();
    camera;
    controls;
    raycaster = new THREE.Raycaster();
    pointer = new THREE.Vector2();
    proxies;
    proxyIds = [];
    fullPool = new Map();
    labelPool = new Map();
    cellPool = [];
    markerPool = [];
    arrowHandles = [];
    arrowRoot = new THREE.Group();
    selected = null;
    lastState = null;
    centered = false;
    constructor(container, callbacks) {
        this.container = container;
        this.callbacks = callbacks;
        this.renderer = new THREE.WebGLRenderer({ antialias: true });
        this.renderer.setPixelRatio(window.devicePixelRatio);
        container.appendChild(this.renderer.domElement);
        this.scene.background = new THREE.Color(0x16191f);
        this.camera = new THREE.PerspectiveCamera(50, 1, 0.1, 500);
        this.camera.up.set(0, 0, 1);
        this.camera.position.set(8, -10, 7);
        this.controls = new OrbitControls(this.camera, this.renderer.domElement);
        this.controls.enableDamping = true;
        this.controls.dampingFactor = 0.1;
        const hemi = new THREE.HemisphereLight(0xf4f6ff, 0x30343c, 1.1);
        hemi.position.set(0, 0, 1);
        this.scene.add(hemi);
        const sun = new THREE.DirectionalLight(0xffffff, 1.4);
        sun.position.set(6, -4, 9);
        this.scene.add(sun);
        const grid = new THREE.GridHelper(60, 60, 0x3a4048, 0x262b33);
        grid.rotation.x = Math.PI / 2; // lie in the xy plane (z up)
        grid.position.z = -0.5;
        this.scene.add(grid);
        this.proxies = this.makeProxyMesh(256);
        this.scene.add(this.proxies);
        this.scene.add(this.arrowRoot);
        this.buildArrows();
        this.arrowRoot.visible = false;
        this.resize();
        new ResizeObserver(() => this.resize()).observe(container);
        this.renderer.domElement.addEventListener("pointerdown", (ev) => this.pick(ev));
    }
    makeProxyMesh(capacity) {
        const geometry = new THREE.BoxGeometry(CUBE_SIZE, CUBE_SIZE, CUBE_SIZE);
        const material = new THREE.MeshLambertMaterial();
        const mesh = new THREE.InstancedMesh(geometry, material, capacity);
        mesh.instanceMatrix.setUsage(THREE.DynamicDrawUsage);
        return mesh;
    }
    resize() {
        const w = this.container.clientWidth || 800;
        const h = this.container.clientHeight || 600;
        this.renderer.setSize(w, h);
        this.camera.aspect = w / h;
        this.camera.updateProjectionMatrix();
    }
    /** Push one frame of display state into the scene graph. */
    update(state) {
        this.lastState = state;
        if (!this.centered && state.cubes.length > 0) {
            this.centerOn(state.cubes);
            this.centered = true;
        }
        this.syncCubes(state);
        this.syncLabels(state);
        this.syncCells(state);
        this.syncMarkers(state);
        this.syncArrows(state);
    }
    renderFrame() {
        this.controls.update();
        this.renderer.render(this.scene, this.camera);
    }
    resetViewOnNextState() {
        this.centered = false;
    }
    centerOn(cubes) {
        const box = new THREE.Box3();
        for (const c of cubes) {
            box.expandByPoint(new THREE.Vector3(...c.position));
        }
        const center = box.getCenter(new THREE.Vector3());
        const radius = Math.max(4, box.getSize(new THREE.Vector3()).length());
        this.controls.target.copy(center);
        this.camera.position
            .copy(center)
            .add(new THREE.Vector3(radius, -radius * 1.2, radius * 0.9));
    }
    syncCubes(state) {
        const proxies = state.cubes.filter((c) => c.fidelity === "proxy");
        const fulls = state.cubes.filter((c) => c.fidelity === "full");
        if (proxies.length > this.proxies.count) {
            this.scene.remove(this.proxies);
            this.proxies.dispose();
            this.proxies = this.makeProxyMesh(Math.max(proxies.length, this.proxies.count * 2));
            this.scene.add(this.proxies);
        }
        const m = new THREE.Matrix4();
        const q = new THREE.Quaternion();
        const pos = new THREE.Vector3();
        const one = new THREE.Vector3(1, 1, 1);
        this.proxyIds = [];
        proxies.forEach((cube, i) => {
            pos.set(...cube.position);
            q.set(cube.orientation.x, cube.orientation.y, cube.orientation.z, cube.orientation.w);
            m.compose(pos, q, one);
            this.proxies.setMatrixAt(i, m);
            this.proxies.setColorAt(i, cube.traveling
                ? TRAVEL_COLOR
                : cube.id === this.selected
                    ? SELECT_COLOR
                    : PROXY_COLOR);
            this.proxyIds.push(cube.id);
        });
        this.proxies.count = proxies.length;
        this.proxies.instanceMatrix.needsUpdate = true;
        if (this.proxies.instanceColor !== null) {
            this.proxies.instanceColor.needsUpdate = true;
        }
        const wanted = new Set(fulls.map((c) => c.id));
        for (const [id, group] of this.fullPool) {
            if (!wanted.has(id)) {
                this.scene.remove(group);
                this.fullPool.delete(id);
            }
        }
        for (const cube of fulls) {
            let group = this.fullPool.get(cube.id);
            if (group === undefined) {
                group = buildFullCube();
                group.userData["cubeId"] = cube.id;
                this.fullPool.set(cube.id, group);
                this.scene.add(group);
            }
            group.position.set(...cube.position);
            group.quaternion.set(cube.orientation.x, cube.orientation.y, cube.orientation.z, cube.orientation.w);
            const body = group.getObjectByName("body");
            const mat = body.material;
            mat.color.copy(cube.traveling
                ? TRAVEL_COLOR
                : cube.id === this.selected
                    ? SELECT_COLOR
                    : FULL_COLOR);
        }
    }
    syncLabels(state) {
        const show = state.overlay.ids;
        const wanted = new Set();
        if (show) {
            for (const cube of state.cubes) {
                wanted.add(cube.id);
                let sprite = this.labelPool.get(cube.id);
                if (sprite === undefined) {
                    sprite = buildLabel(String(cube.id));
                    this.labelPool.set(cube.id, sprite);
                    this.scene.add(sprite);
                }
                sprite.position.set(cube.position[0], cube.position[1], cube.position[2] + 0.75);
                sprite.visible = true;
            }
        }
        for (const [id, sprite] of this.labelPool) {
            if (!wanted.has(id)) {
                sprite.visible = false;
            }
        }
    }
    syncCells(state) {
        const cells = [];
        for (const cell of state.overlay.occupancyCells) {
            cells.push({ at: cell, color: 0x3fae6a });
        }
        for (const cell of state.overlay.blockingCells) {
            cells.push({ at: cell, color: 0xdd3d3d });
        }
        while (this.cellPool.length < cells.length) {
            const mesh = new THREE.Mesh(new THREE.BoxGeometry(1.0, 1.0, 1.0), new THREE.MeshBasicMaterial({
                transparent: true,
                opacity: 0.28,
                depthWrite: false,
            }));
            this.cellPool.push(mesh);
            this.scene.add(mesh);
        }
        this.cellPool.forEach((mesh, i) => {
            const cell = cells[i];
            if (cell === undefined) {
                mesh.visible = false;
                return;
            }
            mesh.visible = true;
            mesh.position.set(...cell.at);
            mesh.material.color.setHex(cell.color);
        });
    }
    syncMarkers(state) {
        const markers = [];
        if (state.overlay.drives.length > 0) {
            const byId = new Map(state.cubes.map((c) => [c.id, c]));
            for (const drive of state.overlay.drives) {
                const cube = byId.get(drive.cube);
                if (cube === undefined) {
                    continue;
                }
                markers.push({
                    at: emMarkerAt(cube.position, cube.orientation, drive.em),
                    color: POLARITY_COLORS[drive.polarity] ?? 0x8a8a8a,
                });
            }
        }
        while (this.markerPool.length < markers.length) {
            const mesh = new THREE.Mesh(new THREE.SphereGeometry(0.09, 12, 12), new THREE.MeshBasicMaterial());
            this.markerPool.push(mesh);
            this.scene.add(mesh);
        }
        this.markerPool.forEach((mesh, i) => {
            const marker = markers[i];
            if (marker === undefined) {
                mesh.visible = false;
                return;
            }
            mesh.visible = true;
            mesh.position.set(...marker.at);
            mesh.material.color.setHex(marker.color);
        });
    }
    buildArrows() {
        const axes = ["x", "y", "z"];
        for (const axis of axes) {
            for (const direction of ["ccw", "cw"]) {
                const group = buildArrow(AXIS_COLORS[axis], axis, direction === "ccw");
                this.arrowRoot.add(group);
                this.arrowHandles.push({ group, axis, direction });
            }
        }
    }
    syncArrows(state) {
        if (this.selected === null || state.busy) {
            this.arrowRoot.visible = false;
            return;
        }
        const cube = state.cubes.find((c) => c.id === this.selected);
        if (cube === undefined) {
            this.selected = null;
            this.arrowRoot.visible = false;
            return;
        }
        this.arrowRoot.visible = true;
        this.arrowRoot.position.set(...cube.position);
    }
    pick(ev) {
        const rect = this.renderer.domElement.getBoundingClientRect();
        this.pointer.set(((ev.clientX - rect.left) / rect.width) * 2 - 1, -((ev.clientY - rect.top) / rect.height) * 2 + 1);
        this.raycaster.setFromCamera(this.pointer, this.camera);
        if (this.arrowRoot.visible && this.selected !== null) {
            const hits = this.raycaster.intersectObject(this.arrowRoot, true);
            const hit = hits[0];
            if (hit !== undefined) {
                for (const handle of this.arrowHandles) {
                    let node = hit.object;
                    while (node !== null) {
                        if (node === handle.group) {
                            this.callbacks.onArrow(this.selected, handle.axis, handle.direction);
                            return;
                        }
                        node = node.parent;
                    }
                }
            }
        }
        const targets = [this.proxies];
        for (const group of this.fullPool.values()) {
            targets.push(group);
        }
        const hits = this.raycaster.intersectObjects(targets, true);
        const hit = hits[0];
        if (hit === undefined) {
            this.select(null);
            return;
        }
        if (hit.object === this.proxies && hit.instanceId !== undefined) {
            this.select(this.proxyIds[hit.instanceId] ?? null);
            return;
        }
        let node = hit.object;
        while (node !== null) {
            const id = node.userData["cubeId"];
            if (typeof id === "number") {
                this.select(id);
                return;
            }
            node = node.parent;
        }
        this.select(null);
    }
    select(id) {
        this.selected = id;
        this.callbacks.onSelect?.(id);
        if (this.lastState !== null) {
            this.update(this.lastState);
        }
    }
}
function buildFullCube() {
    const group = new THREE.Group();
    const body = new THREE.Mesh(new THREE.BoxGeometry(CUBE_SIZE, CUBE_SIZE, CUBE_SIZE), new THREE.MeshStandardMaterial({
        color: FULL_COLOR,
        roughness: 0.55,
        metalness: 0.15,
    }));
    body.name = "body";
    group.add(body);
    const edges = new THREE.LineSegments(new THREE.EdgesGeometry(body.geometry), new THREE.LineBasicMaterial({ color: 0x4d5662 }));
    group.add(edges);
    // 12 edge electromagnets: cylinders along each edge axis.
    for (let em = 1; em <= 12; em++) {
        const axis = (em - 1) >> 2;
        const marker = new THREE.Mesh(new THREE.CylinderGeometry(0.055, 0.055, 0.72, 10), new THREE.MeshStandardMaterial({ color: 0x6b7686, roughness: 0.4 }));
        const at = emMarkerAt([0, 0, 0], { w: 1, x: 0, y: 0, z: 0 }, em);
        marker.position.set(...at);
        if (axis === 0) {
            marker.rotation.z = Math.PI / 2; // cylinder default runs along Y
        }
        else if (axis === 2) {
            marker.rotation.x = Math.PI / 2;
        }
        marker.name = `em-${em}`;
        group.add(marker);
    }
    group.userData["cubeId"] = -1;
    return group;
}
function buildLabel(text) {
    const canvas = document.createElement("canvas");
    canvas.width = 128;
    canvas.height = 64;
    const ctx = canvas.getContext("2d");
    ctx.fillStyle = "rgba(10, 12, 16, 0.65)";
    ctx.fillRect(0, 0, canvas.width, canvas.height);
    ctx.font = "bold 40px system-ui, sans-serif";
    ctx.fillStyle = "#f3f6fa";
    ctx.textAlign = "center";
    ctx.textBaseline = "middle";
    ctx.fillText(text, canvas.width / 2, canvas.height / 2);
    const sprite = new THREE.Sprite(new THREE.SpriteMaterial({
        map: new THREE.CanvasTexture(canvas),
        depthTest: false,
    }));
    sprite.scale.set(0.9, 0.45, 1);
    return sprite;
}
/** Curved rotation-arrow: a ring segment with a cone tip, lying in the
 *  plane perpendicular to `axis`; mirrored for the cw sense. */
function buildArrow(color, axis, ccw) {
    const group = new THREE.Group();
    const material = new THREE.MeshBasicMaterial({ color, depthTest: false });
    const arc = new THREE.Mesh(new THREE.TorusGeometry(0.95, 0.045, 8, 24, 1.8), material);
    const tip = new THREE.Mesh(new THREE.ConeGeometry(0.13, 0.3, 12), material);
    // TorusGeometry lies in the XY plane, arc starting at +X toward +Y.
    tip.position.set(Math.cos(1.8) * 0.95, Math.sin(1.8) * 0.95, 0);
    tip.rotation.z = 1.8; // cone +Y axis tangent to the arc end
    group.add(arc, tip);
    if (!ccw) {
        group.scale.y = -1; // mirror flips the rotation sense
    }
    if (axis === "x") {
        group.rotation.y = Math.PI / 2;
        group.rotation.z = Math.PI / 2;
    }
    else if (axis === "y") {
        group.rotation.x = -Math.PI / 2;
    }
    group.renderOrder = 10;
    return group;
}
